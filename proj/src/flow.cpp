#include "icflow/flow.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace icflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinStep = 1e-14;

// Slack for each monitored invariant.
constexpr double kLengthDriftTol = 1e-5;       // relative
constexpr double kAreaTol = 1e-8;
constexpr double kDeficitTol = 1e-8;
constexpr double kCurvatureTol = 1e-6;
constexpr double kRadiusTol = 1e-8;
constexpr double kGradientTol = 1e-6;
constexpr double kMonotoneTol = 1e-8;
constexpr double kSupportTol = 1e-8;
constexpr double kClassicalLengthTol = 1e-4;   // relative, K = 0 only
constexpr double kShorteningAreaTol = 1e-6;    // K = 0 only

// Curve shortening is stopped before a singularity forms.
constexpr double kShorteningMinRadiusCells = 10.0;
constexpr double kShorteningCurvatureRatio = 1e6;

struct NodeGeometry {
    double phi, phi_prime, g, kappa;  // g = sqrt(phi^2 + rho_theta^2)
};

/// Visits every node with its local geometry. Radii are copied into a buffer
/// with two ghost cells on each side so the stencils need no index wrapping.
template <class Fn>
void for_each_node(const SpaceForm& sf, std::span<const double> rho, double h, int order, Fn&& fn)
{
    const std::size_t n = rho.size();
    thread_local std::vector<double> buf;
    buf.resize(n + 4);
    std::copy(rho.begin(), rho.end(), buf.begin() + 2);
    buf[0] = rho[n - 2];
    buf[1] = rho[n - 1];
    buf[n + 2] = rho[0];
    buf[n + 3] = rho[1];
    const double* f = buf.data() + 2;
    const double c1 = order == 4 ? 1.0 / (12.0 * h) : 1.0 / (2.0 * h);
    const double c2 = order == 4 ? 1.0 / (12.0 * h * h) : 1.0 / (h * h);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<std::ptrdiff_t>(i);
        double p, q;
        if (order == 4) {
            p = (-f[ii + 2] + 8.0 * f[ii + 1] - 8.0 * f[ii - 1] + f[ii - 2]) * c1;
            q = (-f[ii + 2] + 16.0 * f[ii + 1] - 30.0 * f[ii] + 16.0 * f[ii - 1] - f[ii - 2]) * c2;
        } else {
            p = (f[ii + 1] - f[ii - 1]) * c1;
            q = (f[ii + 1] - 2.0 * f[ii] + f[ii - 1]) * c2;
        }
        double phi, dphi;
        sf.warp_pair(f[ii], phi, dphi);
        const double g2 = phi * phi + p * p;
        const double g = std::sqrt(g2);
        const double kappa = (phi * phi * dphi + 2.0 * p * p * dphi - q * phi) / (g2 * g);
        fn(i, NodeGeometry{phi, dphi, g, kappa});
    }
}

void convexity_lost(std::size_t i, double kappa)
{
    throw FlowError(FlowStatus::ConvexityLost,
                    "curvature " + format_double(kappa) + " at node " + std::to_string(i) + " is not positive");
}

void eval_rhs(const SpaceForm& sf, std::span<const double> rho, double h, int order, SpeedLaw law,
              std::vector<double>& out)
{
    out.resize(rho.size());
    for_each_node(sf, rho, h, order, [&](std::size_t i, const NodeGeometry& nd) {
        const double w = nd.g / nd.phi;  // sqrt(1 + rho_theta^2 / phi^2)
        switch (law) {
        case SpeedLaw::ConstrainedICF:
            if (!(nd.kappa > 0.0)) convexity_lost(i, nd.kappa);
            // (phi'/kappa - u) w with u w = phi
            out[i] = nd.phi_prime * w / nd.kappa - nd.phi;
            break;
        case SpeedLaw::CurveShortening: out[i] = -nd.kappa * w; break;
        case SpeedLaw::ClassicalICF:
            if (!(nd.kappa > 0.0)) convexity_lost(i, nd.kappa);
            out[i] = w / nd.kappa;
            break;
        }
    });
}

/// out = rho + a k, rejecting radii outside (0, r_admissible).
void stage(const SpaceForm& sf, std::span<const double> rho, const std::vector<double>& k, double a,
           std::vector<double>& out)
{
    out.resize(rho.size());
    const double r_adm = sf.r_admissible();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = rho[i] + a * k[i];
        if (!(r > 0.0 && r < r_adm))
            throw FlowError(FlowStatus::PoleHit, "radius " + format_double(r) + " at node " + std::to_string(i) +
                                                     " left the admissible range");
        out[i] = r;
    }
}

RadialCurve rk4(const RadialCurve& c, SpeedLaw law, const std::vector<double>& k1, double dt)
{
    const auto& sf = c.space();
    const double h = c.spacing();
    const int order = c.stencil_order();
    thread_local std::vector<double> y, k2, k3, k4;
    stage(sf, c.rho(), k1, 0.5 * dt, y);
    eval_rhs(sf, y, h, order, law, k2);
    stage(sf, c.rho(), k2, 0.5 * dt, y);
    eval_rhs(sf, y, h, order, law, k3);
    stage(sf, c.rho(), k3, dt, y);
    eval_rhs(sf, y, h, order, law, k4);
    for (std::size_t i = 0; i < k4.size(); ++i) k4[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    std::vector<double> next;
    stage(sf, c.rho(), k4, dt, next);
    return c.with_rho(std::move(next));
}

double sup_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(x));
    }
    return m;
}

/// Tracks the invariants guaranteed by a law and records slack violations.
class Monitor {
public:
    Monitor(const RadialCurve& c0, SpeedLaw law, const GeometryReport& r0, FlowTrace& trace)
        : law_(law), K_(c0.space().K()), first_(r0), prev_(r0), trace_(trace)
    {
        // u = phi / sqrt(1 + (rho_theta/phi)^2) with rho and rho_theta/phi bounded by their initial extremes
        const double phi_min = c0.space().warp_unchecked(r0.rho_min).phi;
        trace_.support_floor = phi_min / std::sqrt(1.0 + r0.grad_monitor * r0.grad_monitor);
    }

    void check(double t, const GeometryReport& r)
    {
        if (law_ == SpeedLaw::ConstrainedICF) {
            excess("length", t, std::abs(r.L - first_.L) / first_.L - kLengthDriftTol);
            excess("area", t, prev_.A - r.A - kAreaTol);
            excess("deficit", t, r.deficit - prev_.deficit - kDeficitTol);
            excess("curvature_lower", t, first_.kappa_min - r.kappa_min - kCurvatureTol);
            excess("curvature_upper", t, r.kappa_max - first_.kappa_max - kCurvatureTol);
            excess("radius_lower", t, first_.rho_min - r.rho_min - kRadiusTol);
            excess("radius_upper", t, r.rho_max - first_.rho_max - kRadiusTol);
            excess("gradient", t, r.grad_monitor - prev_.grad_monitor - kGradientTol);
            excess("monotone_functional", t, r.monotone_functional - prev_.monotone_functional - kMonotoneTol);
            excess("support", t, trace_.support_floor - r.u_min - kSupportTol);
        } else if (K_ == 0 && law_ == SpeedLaw::ClassicalICF) {
            // dL/dt = int (1/kappa) kappa ds = L
            const double expected = first_.L * std::exp(t);
            excess("classical_length", t, std::abs(r.L - expected) / expected - kClassicalLengthTol);
        } else if (K_ == 0 && law_ == SpeedLaw::CurveShortening) {
            // dA/dt = -int kappa ds = -2 pi
            excess("shortening_area", t, std::abs(r.A - (first_.A - kTwoPi * t)) - kShorteningAreaTol);
        }
        prev_ = r;
    }

private:
    void excess(const char* name, double t, double amount)
    {
        if (amount > 0.0 || std::isnan(amount)) trace_.violations.push_back({name, t, amount});
    }

    SpeedLaw law_;
    int K_;
    GeometryReport first_;
    GeometryReport prev_;
    FlowTrace& trace_;
};

FlowTrace run_once(const RadialCurve& c0, SpeedLaw law, const FlowConfig& cfg)
{
    FlowTrace trace;
    trace.law = law;
    trace.config = cfg;

    auto f0 = fields(c0);
    if (requires_convexity(law) && !is_strictly_convex(f0).strictly_convex)
        throw std::domain_error(std::string(to_string(law)) + " needs a strictly convex initial curve; min kappa = " +
                                format_double(is_strictly_convex(f0).margin));

    const auto r0 = make_report(c0, f0);
    trace.times.push_back(0.0);
    trace.reports.push_back(r0);
    trace.snapshots.push_back({0, 0.0, c0});
    Monitor monitor(c0, law, r0, trace);

    RadialCurve cur = c0;
    double t = 0.0;
    long steps = 0;
    const double h = c0.spacing();

    auto record = [&](const RadialCurve& c) {
        const auto r = make_report(c);
        trace.times.push_back(t);
        trace.reports.push_back(r);
        monitor.check(t, r);
    };

    try {
        for (;;) {
            if (t >= cfg.t_end) {
                trace.status = FlowStatus::TimeLimit;
                break;
            }
            if (steps >= cfg.max_steps) {
                trace.status = FlowStatus::TimeLimit;
                trace.message = "step budget exhausted";
                break;
            }
            const auto k1 = rhs(cur, law);
            const double speed = sup_abs(k1);
            if (!std::isfinite(speed)) throw FlowError(FlowStatus::StepUnderflow, "non-finite speed");
            if (speed < cfg.eps_stationary) {
                trace.status = FlowStatus::Converged;
                break;
            }
            if (law == SpeedLaw::CurveShortening) {
                const auto fc = fields(cur);
                const double rmin = *std::min_element(cur.rho().begin(), cur.rho().end());
                double kmax = 0.0;
                for (double k : fc.kappa) kmax = std::max(kmax, std::abs(k));
                if (rmin < kShorteningMinRadiusCells * h || kmax * length(cur, fc) / kTwoPi > kShorteningCurvatureRatio)
                    throw FlowError(FlowStatus::StepUnderflow, "curve shortening approaching a singularity");
            }
            const double dt = std::min(stable_dt(cur, law, cfg.sigma), cfg.t_end - t);
            auto next = rk4(cur, law, k1, dt);
            ++steps;
            t = (cfg.t_end - t - dt <= 0.0) ? cfg.t_end : t + dt;

            if (steps % cfg.report_stride == 0) {
                const auto fc = fields(cur);
                double dl = 0.0, da = 0.0;
                for (std::size_t i = 0; i < cur.size(); ++i) {
                    // F = rhs * phi / sqrt(phi^2 + rho_theta^2), and ds = sqrt(...) dtheta
                    dl += k1[i] * fc.phi[i] * fc.kappa[i];
                    da += k1[i] * fc.phi[i];
                }
                dl *= h;
                da *= h;
                const double L_cur = length(cur, fc), A_cur = area(cur, fc);
                record(next);
                const auto& rn = trace.reports.back();
                auto& id = trace.identities;
                id.max_length_rate_error = std::max(id.max_length_rate_error, std::abs((rn.L - L_cur) / dt - dl));
                id.max_area_rate_error = std::max(id.max_area_rate_error, std::abs((rn.A - A_cur) / dt - da));
                ++id.samples;
            }
            const bool on_stride = cfg.snapshot_stride > 0 && steps % cfg.snapshot_stride == 0;
            const bool on_log = cfg.log_snapshots && steps % cfg.report_stride == 0 &&
                                std::has_single_bit(static_cast<unsigned long>(steps / cfg.report_stride));
            if (on_stride || on_log) trace.snapshots.push_back({steps, t, next});
            cur = std::move(next);
        }
    } catch (const FlowError& e) {
        trace.status = e.status();
        trace.message = e.what();
    }

    if (trace.times.back() != t) record(cur);
    if (trace.snapshots.back().step != steps) trace.snapshots.push_back({steps, t, cur});
    trace.steps = steps;
    trace.t_final = t;

    if (trace.status == FlowStatus::Converged && law == SpeedLaw::ConstrainedICF) {
        const double r_inf = c0.space().circle_radius_for_length(r0.L);
        double dev = 0.0;
        for (double r : cur.rho()) dev = std::max(dev, std::abs(r - r_inf));
        trace.limit_deviation = dev;
        const double over = dev - 10.0 * cfg.eps_stationary;
        if (over > 0.0) trace.violations.push_back({"limit", t, over});
    }
    return trace;
}

}  // namespace

bool requires_convexity(SpeedLaw law) noexcept { return law != SpeedLaw::CurveShortening; }

std::string_view to_string(SpeedLaw law) noexcept
{
    switch (law) {
    case SpeedLaw::ConstrainedICF: return "ConstrainedICF";
    case SpeedLaw::CurveShortening: return "CurveShortening";
    case SpeedLaw::ClassicalICF: return "ClassicalICF";
    }
    return "?";
}

SpeedLaw parse_speed_law(std::string_view name)
{
    if (name == "constrained" || name == "ConstrainedICF") return SpeedLaw::ConstrainedICF;
    if (name == "csf" || name == "curve-shortening" || name == "CurveShortening") return SpeedLaw::CurveShortening;
    if (name == "classical" || name == "ClassicalICF") return SpeedLaw::ClassicalICF;
    throw std::invalid_argument("unknown speed law '" + std::string(name) + "'");
}

std::string_view to_string(FlowStatus s) noexcept
{
    switch (s) {
    case FlowStatus::Converged: return "Converged";
    case FlowStatus::TimeLimit: return "TimeLimit";
    case FlowStatus::ConvexityLost: return "ConvexityLost";
    case FlowStatus::PoleHit: return "PoleHit";
    case FlowStatus::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

void FlowConfig::validate() const
{
    if (!(sigma > 0.0 && sigma <= 0.5)) throw std::invalid_argument("sigma must lie in (0, 0.5]");
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (!(eps_stationary >= 0.0)) throw std::invalid_argument("eps_stationary must be nonnegative");
    if (report_stride < 1) throw std::invalid_argument("report_stride must be at least 1");
    if (snapshot_stride < 0) throw std::invalid_argument("snapshot_stride must be nonnegative");
}

std::vector<double> rhs(const RadialCurve& c, SpeedLaw law)
{
    std::vector<double> out;
    eval_rhs(c.space(), c.rho(), c.spacing(), c.stencil_order(), law, out);
    return out;
}

double stable_dt(const RadialCurve& c, SpeedLaw law, double sigma)
{
    double d_max = 0.0;
    for_each_node(c.space(), c.rho(), c.spacing(), c.stencil_order(), [&](std::size_t i, const NodeGeometry& n) {
        const double g2 = n.g * n.g;
        double d = 0.0;
        switch (law) {
        case SpeedLaw::ConstrainedICF:
            if (!(n.kappa > 0.0)) convexity_lost(i, n.kappa);
            d = n.phi_prime / (n.kappa * n.kappa * g2);
            break;
        case SpeedLaw::CurveShortening: d = 1.0 / g2; break;
        case SpeedLaw::ClassicalICF:
            if (!(n.kappa > 0.0)) convexity_lost(i, n.kappa);
            d = 1.0 / (n.kappa * n.kappa * g2);
            break;
        }
        d_max = std::max(d_max, d);
    });
    const double h = c.spacing();
    const double dt = sigma * h * h / d_max;
    if (!(dt >= kMinStep)) throw FlowError(FlowStatus::StepUnderflow, "stable step " + format_double(dt) + " underflows");
    return dt;
}

RadialCurve step(const RadialCurve& c, SpeedLaw law, double dt) { return rk4(c, law, rhs(c, law), dt); }

FlowTrace run(const RadialCurve& c0, SpeedLaw law, const FlowConfig& config)
{
    config.validate();
    auto trace = run_once(c0, law, config);
    if (config.refine_on_failure && is_failure(trace.status)) {
        auto finer = config;
        finer.sigma *= 0.5;
        auto retry = run_once(resample(c0, 2 * c0.size()), law, finer);
        retry.refined = true;
        return retry;
    }
    return trace;
}

RadialCurve resample(const RadialCurve& c, std::size_t n)
{
    const std::size_t N = c.size();
    const std::size_t half = N / 2;
    std::vector<double> a(half + 1, 0.0), b(half + 1, 0.0);
    for (std::size_t k = 0; k <= half; ++k) {
        double sa = 0.0, sb = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            const double ang = kTwoPi * static_cast<double>((k * j) % N) / static_cast<double>(N);
            sa += c.rho(j) * std::cos(ang);
            sb += c.rho(j) * std::sin(ang);
        }
        a[k] = sa * 2.0 / static_cast<double>(N);
        b[k] = sb * 2.0 / static_cast<double>(N);
    }
    a[0] *= 0.5;
    a[half] *= 0.5;  // Nyquist mode is split evenly between +half and -half
    b[half] = 0.0;
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        double s = a[0];
        for (std::size_t k = 1; k <= half; ++k) s += a[k] * std::cos(k * th) + b[k] * std::sin(k * th);
        rho[i] = s;
    }
    return c.with_rho(std::move(rho));
}

double fourier_amplitude(std::span<const double> values, int m)
{
    const std::size_t N = values.size();
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        const double ang = kTwoPi * static_cast<double>((static_cast<std::size_t>(m) * j) % N) / static_cast<double>(N);
        re += values[j] * std::cos(ang);
        im -= values[j] * std::sin(ang);
    }
    return 2.0 / static_cast<double>(N) * std::hypot(re, im);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

DecayFit decay_rate(const FlowTrace& trace, int m)
{
    if (trace.law != SpeedLaw::ConstrainedICF || trace.status != FlowStatus::Converged)
        throw std::invalid_argument("decay_rate needs a converged ConstrainedICF trace");
    if (m < 1) throw std::invalid_argument("decay_rate: mode index must be positive");
    const auto& c0 = trace.initial_curve();
    const auto& sf = c0.space();

    DecayFit fit{};
    fit.rho_inf = sf.circle_radius_for_length(trace.reports.front().L);
    const double dphi = sf.warp(fit.rho_inf).phi_prime;
    fit.predicted_rate = static_cast<double>(m * m) / dphi;
    fit.l2_bound = 1.0 / (8.0 * dphi);

    for (const auto& s : trace.snapshots) {
        std::vector<double> sigma(s.curve.size());
        double l2 = 0.0;
        for (std::size_t i = 0; i < sigma.size(); ++i) {
            sigma[i] = s.curve.rho(i) - fit.rho_inf;
            l2 += sigma[i] * sigma[i];
        }
        fit.times.push_back(s.time);
        fit.amplitudes.push_back(fourier_amplitude(sigma, m));
        fit.l2.push_back(std::sqrt(l2 * s.curve.spacing()));
    }

    constexpr double kFloor = 1e-11;
    const double start_level = 0.1 * fit.amplitudes.front();
    std::vector<double> t, log_a, log_l2;
    bool started = false;
    for (std::size_t i = 0; i < fit.times.size(); ++i) {
        const double a = fit.amplitudes[i];
        if (!started && a < start_level) started = true;
        if (!started) continue;
        if (a < kFloor) break;
        t.push_back(fit.times[i]);
        log_a.push_back(std::log(a));
        log_l2.push_back(std::log(fit.l2[i]));
    }
    fit.samples = static_cast<long>(t.size());
    if (t.size() < 20)
        throw std::runtime_error("decay_rate: fit window holds " + std::to_string(t.size()) +
                                 " snapshots, need at least 20");
    fit.window_begin = t.front();
    fit.window_end = t.back();
    fit.measured_rate = -fit_slope(t, log_a);
    fit.l2_rate = -fit_slope(t, log_l2);
    return fit;
}

}  // namespace icflow
