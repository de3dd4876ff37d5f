#include "icflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "icflow/svg.hpp"

namespace icflow {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Grid {
    SpaceForm sf;
    std::size_t N;
    int order;
};

Grid read_grid(const ExperimentConfig& cfg, long default_K, long default_N)
{
    const long K = cfg.get_int("K", default_K);
    const long N = cfg.get_int("N", default_N);
    const long order = cfg.get_int("stencil_order", 4);
    if (K < -1 || K > 1) throw ConfigError("K must be -1, 0 or 1, got " + std::to_string(K));
    if (N < 16 || N % 2 != 0) throw ConfigError("N must be even and at least 16, got " + std::to_string(N));
    if (order != 2 && order != 4) throw ConfigError("stencil_order must be 2 or 4, got " + std::to_string(order));
    return {SpaceForm(static_cast<int>(K)), static_cast<std::size_t>(N), static_cast<int>(order)};
}

// The initial curve comes from curve_file when given, otherwise from the curve spec keys.
struct InitialCurve {
    RadialCurve curve;
    json description;
};

InitialCurve read_initial_curve(const ExperimentConfig& cfg, const Grid& g)
{
    const auto file = cfg.get_string("curve_file", "");
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw ConfigError("cannot open curve_file " + file);
        auto c = read_curve_csv(in, g.order);
        if (c.space().K() != g.sf.K())
            throw ConfigError("curve_file has K=" + std::to_string(c.space().K()) + " but K=" +
                              std::to_string(g.sf.K()) + " was requested");
        return {std::move(c), json{{"curve_file", fs::path(file).filename().string()}}};
    }
    const auto spec = curve_spec_from(cfg);
    return {generate(spec, g.sf, g.N, g.order), to_json(spec)};
}

json config_echo(const ExperimentConfig& cfg)
{
    auto j = json::object();
    for (const auto& [k, v] : cfg.entries())
        if (k != "out") j[k] = v;
    return j;
}

json meta(const std::string& command, const ExperimentConfig& cfg)
{
    return {{"program", "icflow"}, {"command", command}, {"config", config_echo(cfg)}};
}

json point_json(const Point3& p) { return json::array({p[0], p[1], p[2]}); }

std::string fmt_g(double v, int digits = 6)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// Residual series fit: observed order from the points above the rounding floor.
json order_fit(const std::vector<std::size_t>& Ns, const std::vector<double>& res)
{
    std::vector<double> x, y;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        if (std::abs(res[i]) > kResidualFloor) {
            x.push_back(std::log(static_cast<double>(Ns[i])));
            y.push_back(std::log(std::abs(res[i])));
        }
    }
    json j;
    auto arr = json::array();
    for (double r : res) arr.push_back(json_number(r));
    j["residuals"] = arr;
    j["at_floor"] = x.size() < 2;
    j["observed_order"] = x.size() < 2 ? json(nullptr) : json(-fit_slope(x, y));
    return j;
}

}  // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"simulate",       "report",     "sweep", "counterexample",
                                                "rate-study", "convergence-study"};
    return names;
}

int run_command(const std::string& name, const ExperimentConfig& cfg, const fs::path& out, std::ostream& log,
                std::ostream& err)
{
    try {
        (void)cfg.get_u64("seed", 0);
        if (name == "simulate") return cmd_simulate(cfg, out, log);
        if (name == "report") return cmd_report(cfg, out, log);
        if (name == "sweep") return cmd_sweep(cfg, out, log);
        if (name == "counterexample") return cmd_counterexample(cfg, out, log);
        if (name == "rate-study") return cmd_rate_study(cfg, out, log);
        if (name == "convergence-study") return cmd_convergence_study(cfg, out, log);
        err << "error: unknown command '" << name << "'\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_simulate(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log)
{
    const auto g = read_grid(cfg, 0, 256);
    const auto law = parse_speed_law(cfg.get_string("law", "constrained"));
    const auto fc = flow_config_from(cfg);
    const bool want_svg = cfg.get_bool("svg", true);
    auto init = read_initial_curve(cfg, g);
    cfg.reject_unused();

    log << "simulate: K=" << g.sf.K() << " N=" << g.N << " law=" << to_string(law) << '\n';
    const auto trace = run(init.curve, law, fc);

    auto extra = meta("simulate", cfg);
    extra["curve"] = init.description;
    export_trace(out, trace, extra);

    if (want_svg) {
        const auto& snaps = trace.snapshots;
        std::vector<std::size_t> pick{0};
        if (snaps.size() > 2) {
            const std::size_t inner = std::min<std::size_t>(3, snaps.size() - 2);
            for (std::size_t k = 1; k <= inner; ++k) {
                const std::size_t idx = k * (snaps.size() - 1) / (inner + 1);
                if (idx != pick.back()) pick.push_back(idx);
            }
        }
        if (snaps.size() > 1) pick.push_back(snaps.size() - 1);
        std::vector<SvgCurve> curves;
        for (auto idx : pick) curves.push_back({&snaps[idx].curve, "t = " + fmt_g(snaps[idx].time)});
        write_text_file(out / "overlay.svg",
                        overlay_svg(curves, std::string(to_string(law)) + " K=" + std::to_string(g.sf.K())));
    }

    log << "status " << to_string(trace.status) << " after " << trace.steps << " steps, t = " << fmt_g(trace.t_final)
        << ", " << trace.violations.size() << " monitor violation(s)\n";
    if (is_failure(trace.status)) return kExitFlow;
    return trace.violations.empty() ? kExitOk : kExitAssertion;
}

int cmd_report(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log)
{
    const auto g = read_grid(cfg, 0, 512);
    auto init = read_initial_curve(cfg, g);
    cfg.reject_unused();

    const auto& c = init.curve;
    const auto f = fields(c);
    const auto r = make_report(c, f);
    const auto conv = is_strictly_convex(f);
    const bool convex = conv.margin > -kConvexTolerance;

    auto j = meta("report", cfg);
    j["K"] = g.sf.K();
    j["N"] = g.N;
    j["curve"] = init.description;
    j["strictly_convex"] = conv.strictly_convex;
    j["convexity_margin"] = conv.margin;
    j["quadrature_tolerance"] = quadrature_tolerance(r.L);
    j["report"] = to_json(r);
    j["corollary_margin"] = (g.sf.K() != 0 && convex) ? json(corollary_margin(c, f)) : json(nullptr);
    j["nonconvex_margin"] = g.sf.K() == -1 ? json(nonconvex_margin(c, f)) : json(nullptr);
    if (g.sf.K() == 1 && conv.strictly_convex) {
        try {
            const auto cert = gp_counterexample_gap(c);
            j["gp"] = {{"y0", point_json(cert.y0)}, {"F", cert.F}, {"bound", cert.bound}, {"gap", cert.gap}};
        } catch (const std::domain_error& e) {
            j["gp"] = {{"error", e.what()}};
        }
    }
    write_text_file(out / "report.json", dump_json(j));

    std::string csv;
    for (const auto& name : report_field_names()) csv += (csv.empty() ? "" : ",") + name;
    csv += "\n" + report_csv_row(r) + "\n";
    write_text_file(out / "report.csv", csv);

    std::ostringstream curve_csv;
    write_curve_csv(curve_csv, c);
    write_text_file(out / "curve.csv", curve_csv.str());
    write_text_file(out / "curve.svg", overlay_svg({{&c, "curve"}}, "K=" + std::to_string(g.sf.K())));

    log << "report: L = " << fmt_g(r.L, 12) << ", A = " << fmt_g(r.A, 12) << ", deficit = " << fmt_g(r.deficit) << '\n';
    return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log)
{
    const auto g = read_grid(cfg, 0, 512);
    const long n = cfg.get_int("n", 200);
    const auto seed = cfg.get_u64("seed", 0);
    const double r0 = cfg.get_double("r0", 1.0);
    const auto shape_name = cfg.get_string("shape", "convex");
    cfg.reject_unused();

    if (n < 0) throw ConfigError("n must be nonnegative");
    if (!(r0 > 0.0) || !g.sf.admissible(r0)) throw ConfigError("r0 outside the admissible radius range");
    RandomShape shape;
    if (shape_name == "convex")
        shape = RandomShape::Convex;
    else if (shape_name == "nonconvex")
        shape = RandomShape::NonConvex;
    else
        throw ConfigError("shape must be 'convex' or 'nonconvex', got '" + shape_name + "'");
    if (shape == RandomShape::NonConvex && g.sf.K() != -1)
        throw ConfigError("nonconvex sweeps are defined for K = -1 only");

    // functionals asserted for this shape and K, in output order
    std::vector<std::string> checked;
    if (shape == RandomShape::Convex) {
        checked = {"hk_gap", "weighted_margin"};
        if (g.sf.K() != 0) checked.push_back("corollary_margin");
    }
    if (g.sf.K() == -1) checked.push_back("nonconvex_margin");

    std::map<std::string, double> min_margin;
    std::map<std::string, long> count;
    for (const auto& name : checked) {
        min_margin[name] = std::numeric_limits<double>::infinity();
        count[name] = 0;
    }
    auto violations = json::array();

    std::string csv = "index";
    for (const auto& name : report_field_names()) csv += "," + name;
    csv += ",corollary_margin,nonconvex_margin\n";

    SplitMix64 rng(seed);
    for (long i = 0; i < n; ++i) {
        const auto c = generate_random(rng, shape, r0, g.sf, g.N, g.order);
        const auto f = fields(c);
        const auto r = make_report(c, f);
        std::map<std::string, double> v;
        if (r.hk_gap) v["hk_gap"] = *r.hk_gap;
        if (r.weighted_margin) v["weighted_margin"] = *r.weighted_margin;
        const double cor = (g.sf.K() != 0 && shape == RandomShape::Convex) ? corollary_margin(c, f) : kNaN;
        const double ncv = g.sf.K() == -1 ? nonconvex_margin(c, f) : kNaN;
        v["corollary_margin"] = cor;
        v["nonconvex_margin"] = ncv;
        for (const auto& name : checked) {
            const double m = v.count(name) ? v[name] : kNaN;
            min_margin[name] = std::min(min_margin[name], m);
            if (!(m >= kSweepViolation)) {
                ++count[name];
                violations.push_back({{"index", i}, {"functional", name}, {"value", json_number(m)}});
            }
        }
        csv += std::to_string(i) + "," + report_csv_row(r) + "," + (std::isnan(cor) ? "" : format_double(cor)) + "," +
               (std::isnan(ncv) ? "" : format_double(ncv)) + "\n";
    }

    // equality cases on the centered circle of radius r0
    const RadialCurve circle(g.sf, std::vector<double>(g.N, r0), g.order);
    const auto cf = fields(circle);
    const auto cr = make_report(circle, cf);
    json eq;
    eq["radius"] = r0;
    std::map<std::string, double> eq_values{{"hk_gap", *cr.hk_gap},
                                            {"weighted_margin", *cr.weighted_margin},
                                            {"deficit", cr.deficit},
                                            {"minkowski_residual", cr.minkowski_residual}};
    if (g.sf.K() != 0) eq_values["corollary_margin"] = corollary_margin(circle, cf);
    if (g.sf.K() == -1) eq_values["nonconvex_margin"] = nonconvex_margin(circle, cf);
    if (g.sf.K() == 1) eq_values["gp_gap"] = gp_counterexample_gap(circle).gap;
    double eq_max = 0.0;
    json eq_json = json::object();
    for (const auto& [k, val] : eq_values) {
        eq_json[k] = val;
        eq_max = std::max(eq_max, std::abs(val));
    }
    eq["values"] = eq_json;
    eq["max_abs"] = eq_max;
    eq["tolerance"] = kEqualityTolerance;
    eq["pass"] = eq_max <= kEqualityTolerance;

    long total = 0;
    auto jmin = json::object(), jcount = json::object();
    for (const auto& name : checked) {
        jmin[name] = n > 0 ? json_number(min_margin[name]) : json(nullptr);
        jcount[name] = count[name];
        total += count[name];
    }
    const bool pass = total == 0 && eq_max <= kEqualityTolerance;

    auto j = meta("sweep", cfg);
    j["K"] = g.sf.K();
    j["N"] = g.N;
    j["n"] = n;
    j["seed"] = seed;
    j["sampler"] = {{"generator", "splitmix64"},
                    {"shape", shape_name},
                    {"r0", r0},
                    {"modes", shape == RandomShape::Convex ? "1..8" : "2..8"},
                    {"coefficient_bound", shape == RandomShape::Convex ? "0.3/m^3" : "0.4/m"}};
    j["threshold"] = kSweepViolation;
    j["checked"] = checked;
    j["min_margins"] = jmin;
    j["violation_counts"] = jcount;
    j["violations"] = violations;
    j["equality_cases"] = eq;
    j["pass"] = pass;

    write_text_file(out / "sweep.csv", csv);
    write_text_file(out / "sweep.json", dump_json(j));
    log << "sweep: " << n << " curves, " << total << " violation(s), equality max " << fmt_g(eq_max) << '\n';
    return pass ? kExitOk : kExitAssertion;
}

int cmd_counterexample(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log)
{
    const auto g = read_grid(cfg, 1, 2048);
    const double r0 = cfg.get_double("r0", 0.8);
    const double eps = cfg.get_double("eps", 0.05);
    const long m = cfg.get_int("m", 2);
    const auto scaling_eps = cfg.get_double_list("scaling_eps", {0.0125, 0.025, 0.05});
    cfg.reject_unused();
    if (g.sf.K() != 1) throw ConfigError("counterexample lives on the hemisphere; K must be 1");
    if (m < 1) throw ConfigError("m must be positive");

    auto certify = [&](std::size_t N, double e) {
        return gp_counterexample_gap(perturbed_circle(g.sf, N, r0, e, static_cast<int>(m), g.order));
    };
    const auto c = perturbed_circle(g.sf, g.N, r0, eps, static_cast<int>(m), g.order);
    const auto cert = gp_counterexample_gap(c);
    const auto fine = certify(2 * g.N, eps);

    json refinement;
    refinement["N"] = 2 * g.N;
    refinement["gap"] = fine.gap;
    bool refine_ok;
    if (eps == 0.0) {
        refine_ok = std::abs(cert.gap) <= kEqualityTolerance && std::abs(fine.gap) <= kEqualityTolerance;
        refinement["relative_change"] = nullptr;
    } else {
        const double rel = std::abs(fine.gap - cert.gap) / std::abs(cert.gap);
        refine_ok = rel <= kRefinementTolerance;
        refinement["relative_change"] = json_number(rel);
    }
    refinement["tolerance"] = kRefinementTolerance;
    refinement["pass"] = refine_ok;

    auto eps_sorted = scaling_eps;
    std::sort(eps_sorted.begin(), eps_sorted.end());
    json scaling;
    std::vector<double> gaps, log_e, log_g;
    bool scaling_ok = eps_sorted.size() >= 2;
    for (double e : eps_sorted) {
        if (!(e > 0.0)) throw ConfigError("scaling_eps entries must be positive");
        gaps.push_back(certify(g.N, e).gap);
        scaling_ok = scaling_ok && gaps.back() > 0.0;
        log_e.push_back(std::log(e));
        log_g.push_back(std::log(std::abs(gaps.back())));
    }
    auto ratios = json::array();
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
        const double expected = (eps_sorted[i] / eps_sorted[i + 1]) * (eps_sorted[i] / eps_sorted[i + 1]);
        const double dev = (gaps[i] / gaps[i + 1]) / expected - 1.0;
        scaling_ok = scaling_ok && std::abs(dev) <= kScalingTolerance;
        ratios.push_back({{"eps", json::array({eps_sorted[i], eps_sorted[i + 1]})},
                          {"gap_ratio", gaps[i] / gaps[i + 1]},
                          {"quadratic_ratio", expected},
                          {"relative_deviation", dev}});
    }
    scaling["eps"] = eps_sorted;
    scaling["gaps"] = gaps;
    scaling["fitted_exponent"] = gaps.size() >= 2 ? json(fit_slope(log_e, log_g)) : json(nullptr);
    scaling["ratios"] = ratios;
    scaling["tolerance"] = kScalingTolerance;
    scaling["pass"] = scaling_ok;

    const bool gap_ok = eps == 0.0 ? std::abs(cert.gap) <= kEqualityTolerance : cert.gap > 0.0;
    const Point3 pole{0.0, 0.0, 1.0};
    const double pole_dev = std::sqrt((cert.y0[0] - pole[0]) * (cert.y0[0] - pole[0]) +
                                      (cert.y0[1] - pole[1]) * (cert.y0[1] - pole[1]) +
                                      (cert.y0[2] - pole[2]) * (cert.y0[2] - pole[2]));

    auto j = meta("counterexample", cfg);
    j["r0"] = r0;
    j["eps"] = eps;
    j["m"] = m;
    j["N"] = g.N;
    j["y0"] = point_json(cert.y0);
    j["y0_pole_distance"] = pole_dev;
    j["F"] = cert.F;
    j["bound"] = cert.bound;
    j["gap"] = cert.gap;
    j["L"] = length(c);
    j["gap_positive"] = gap_ok;
    j["refinement_check"] = refinement;
    j["scaling_check"] = scaling;
    const bool pass = gap_ok && refine_ok && scaling_ok;
    j["pass"] = pass;
    write_text_file(out / "certificate.json", dump_json(j));

    std::ostringstream curve_csv;
    write_curve_csv(curve_csv, c);
    write_text_file(out / "curve.csv", curve_csv.str());
    const RadialCurve circle(g.sf, std::vector<double>(g.N, r0), g.order);
    write_text_file(out / "curve.svg",
                    overlay_svg({{&circle, "circle r0 = " + fmt_g(r0)}, {&c, "perturbed, eps = " + fmt_g(eps)}},
                                "hemisphere counterexample"));

    log << "counterexample: gap = " << fmt_g(cert.gap, 10) << " (N=" << g.N << "), " << fmt_g(fine.gap, 10)
        << " (N=" << 2 * g.N << ")" << (pass ? "" : "; assertion failed") << '\n';
    return pass ? kExitOk : kExitAssertion;
}

int cmd_rate_study(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log)
{
    const auto g = read_grid(cfg, 0, 128);
    const double r0 = cfg.get_double("r0", g.sf.K() == 1 ? 0.6 : 1.0);
    const long m = cfg.get_int("m", 2);
    const double eps = cfg.get_double("eps", 1e-3);
    FlowConfig fc;
    fc.sigma = cfg.get_double("sigma", 0.1);
    fc.t_end = cfg.get_double("t_end", 200.0);
    fc.eps_stationary = cfg.get_double("eps_stationary", 1e-11);
    fc.report_stride = cfg.get_int("report_stride", 100);
    const double per_efold = cfg.get_double("samples_per_efold", 10.0);
    cfg.reject_unused();
    if (m < 1 || 2 * static_cast<std::size_t>(m) >= g.N) throw ConfigError("m must lie in [1, N/2)");
    if (!(per_efold > 0.0)) throw ConfigError("samples_per_efold must be positive");

    // about 1/(m^2 sigma h^2) steps per e-fold of mode m near the limit circle
    const double h = 2.0 * std::numbers::pi / static_cast<double>(g.N);
    fc.snapshot_stride = std::max(1L, std::lround(1.0 / (static_cast<double>(m * m) * fc.sigma * h * h * per_efold)));
    try {
        fc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const auto c0 = perturbed_circle(g.sf, g.N, r0, eps, static_cast<int>(m), g.order);
    log << "rate-study: K=" << g.sf.K() << " r0=" << fmt_g(r0) << " m=" << m << " eps=" << fmt_g(eps) << '\n';
    const auto trace = run(c0, SpeedLaw::ConstrainedICF, fc);

    std::ostringstream trace_csv;
    write_trace_csv(trace_csv, trace);
    write_text_file(out / "trace.csv", trace_csv.str());
    auto summary = trace_summary(trace);
    write_text_file(out / "summary.json", dump_json(summary));

    auto j = meta("rate-study", cfg);
    j["K"] = g.sf.K();
    j["N"] = g.N;
    j["r0"] = r0;
    j["m"] = m;
    j["eps"] = eps;
    j["status"] = std::string(to_string(trace.status));
    j["snapshot_stride"] = fc.snapshot_stride;
    j["monitor_violations"] = trace.violations.size();
    if (is_failure(trace.status) || trace.status != FlowStatus::Converged) {
        j["error"] = "flow did not converge: " + trace.message;
        j["pass"] = false;
        write_text_file(out / "rate.json", dump_json(j));
        log << "rate-study: flow ended with status " << to_string(trace.status) << '\n';
        return is_failure(trace.status) ? kExitFlow : kExitAssertion;
    }

    DecayFit fit;
    try {
        fit = decay_rate(trace, static_cast<int>(m));
    } catch (const std::runtime_error& e) {
        j["error"] = e.what();
        j["pass"] = false;
        write_text_file(out / "rate.json", dump_json(j));
        log << "rate-study: " << e.what() << '\n';
        return kExitAssertion;
    }

    const double rel = std::abs(fit.measured_rate - fit.predicted_rate) / fit.predicted_rate;
    const bool rate_ok = rel <= kRateTolerance;
    const bool l2_ok = fit.l2_rate >= fit.l2_bound;
    j["rho_inf"] = fit.rho_inf;
    j["measured"] = fit.measured_rate;
    j["predicted"] = fit.predicted_rate;
    j["relative_error"] = rel;
    j["tolerance"] = kRateTolerance;
    j["l2_rate"] = fit.l2_rate;
    j["l2_bound"] = fit.l2_bound;
    j["l2_dominates_bound"] = l2_ok;
    j["window"] = {{"begin", fit.window_begin}, {"end", fit.window_end}, {"samples", fit.samples}};
    j["pass"] = rate_ok && l2_ok;
    write_text_file(out / "rate.json", dump_json(j));

    std::string csv = "t,amplitude,log_amplitude,l2\n";
    for (std::size_t i = 0; i < fit.times.size(); ++i)
        csv += format_double(fit.times[i]) + "," + format_double(fit.amplitudes[i]) + "," +
               format_double(std::log(fit.amplitudes[i])) + "," + format_double(fit.l2[i]) + "\n";
    write_text_file(out / "amplitudes.csv", csv);

    log << "rate-study: measured " << fmt_g(fit.measured_rate, 8) << ", predicted " << fmt_g(fit.predicted_rate, 8)
        << ", relative error " << fmt_g(rel, 3) << '\n';
    return rate_ok && l2_ok ? kExitOk : kExitAssertion;
}

int cmd_convergence_study(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log)
{
    const long K = cfg.get_int("K", 0);
    if (K < -1 || K > 1) throw ConfigError("K must be -1, 0 or 1");
    const SpaceForm sf(static_cast<int>(K));
    const auto Ns_raw = cfg.get_int_list("Ns", {128, 256, 512, 1024});
    const auto orders = cfg.get_int_list("orders", {2, 4});
    if (cfg.has("N")) throw ConfigError("convergence-study takes a list Ns instead of N");
    const auto spec = curve_spec_from(cfg, "ellipse");
    cfg.reject_unused();

    std::vector<std::size_t> Ns;
    for (long N : Ns_raw) {
        if (N < 16 || N % 2 != 0) throw ConfigError("every N must be even and at least 16");
        Ns.push_back(static_cast<std::size_t>(N));
    }
    std::sort(Ns.begin(), Ns.end());
    for (long p : orders)
        if (p != 2 && p != 4) throw ConfigError("orders may contain only 2 and 4");
    const bool negative_control = spec.kind == CurveKind::Kink;

    std::string csv = "stencil_order,N,minkowski_residual,gb_residual,hk_gap,L,A\n";
    auto studies = json::array();
    bool pass = true;
    for (long p : orders) {
        std::vector<double> mink, gb, hk;
        for (auto N : Ns) {
            const auto c = generate(spec, sf, N, static_cast<int>(p));
            const auto f = fields(c);
            mink.push_back(minkowski_residual(c, f));
            gb.push_back(gauss_bonnet_residual(c, f));
            hk.push_back(is_strictly_convex(f).strictly_convex ? hk_gap(c, f) : kNaN);
            csv += std::to_string(p) + "," + std::to_string(N) + "," + format_double(mink.back()) + "," +
                   format_double(gb.back()) + "," + (std::isnan(hk.back()) ? "" : format_double(hk.back())) + "," +
                   format_double(length(c, f)) + "," + format_double(area(c, f)) + "\n";
        }
        json s;
        s["stencil_order"] = p;
        s["minkowski"] = order_fit(Ns, mink);
        s["gauss_bonnet"] = order_fit(Ns, gb);
        auto hk_json = json::array();
        for (double v : hk) hk_json.push_back(json_number(v));
        s["hk_gap"] = hk_json;
        s["required_order"] = static_cast<double>(p) - 0.5;
        bool ok = true;
        if (!negative_control) {
            for (const auto* key : {"minkowski", "gauss_bonnet"}) {
                const auto& fit = s[key];
                if (!fit["at_floor"].get<bool>() && fit["observed_order"].get<double>() < static_cast<double>(p) - 0.5)
                    ok = false;
            }
        }
        s["asserted"] = !negative_control;
        s["pass"] = ok;
        pass = pass && ok;
        studies.push_back(s);
        log << "convergence-study: order " << p << " observed minkowski "
            << (s["minkowski"]["at_floor"].get<bool>() ? std::string("floor")
                                                       : fmt_g(s["minkowski"]["observed_order"].get<double>(), 4))
            << ", gauss-bonnet "
            << (s["gauss_bonnet"]["at_floor"].get<bool>() ? std::string("floor")
                                                          : fmt_g(s["gauss_bonnet"]["observed_order"].get<double>(), 4))
            << '\n';
    }

    auto j = meta("convergence-study", cfg);
    j["K"] = K;
    j["curve"] = to_json(spec);
    j["Ns"] = Ns;
    j["residual_floor"] = kResidualFloor;
    j["negative_control"] = negative_control;
    j["studies"] = studies;
    j["pass"] = pass;
    write_text_file(out / "convergence.json", dump_json(j));
    write_text_file(out / "convergence.csv", csv);
    return pass ? kExitOk : kExitAssertion;
}

}  // namespace icflow
