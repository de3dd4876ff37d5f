#include "icflow/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace icflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double weighted_sum(const RadialCurve& c, const CurveFields& f, auto&& integrand)
{
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += integrand(i) * f.ds_dtheta[i];
    return s * c.spacing();
}

double min_kappa(const CurveFields& f) { return *std::min_element(f.kappa.begin(), f.kappa.end()); }

void require_convex(const CurveFields& f, const char* what)
{
    const double m = min_kappa(f);
    if (m < -kConvexTolerance)
        throw std::domain_error(std::string(what) + " requires a convex curve; min kappa = " + format_double(m));
}

}  // namespace

double quadrature_tolerance(double L) { return 1e-8 * std::max(1.0, L * L); }

double minkowski_residual(const RadialCurve& c, const CurveFields& f)
{
    return weighted_sum(c, f, [&](std::size_t i) { return f.phi_prime[i] - f.kappa[i] * f.u[i]; });
}
double minkowski_residual(const RadialCurve& c) { return minkowski_residual(c, fields(c)); }

double hk_gap(const RadialCurve& c, const CurveFields& f)
{
    const double m = min_kappa(f);
    if (!(m > 0.0)) throw std::domain_error("hk_gap requires a strictly convex curve; min kappa = " + format_double(m));
    return weighted_sum(c, f, [&](std::size_t i) { return f.phi_prime[i] / f.kappa[i] - f.u[i]; });
}
double hk_gap(const RadialCurve& c) { return hk_gap(c, fields(c)); }

double weighted_phi_kappa(const RadialCurve& c, const CurveFields& f)
{
    return weighted_sum(c, f, [&](std::size_t i) { return f.Phi[i] * f.kappa[i]; });
}
double weighted_phi_kappa(const RadialCurve& c) { return weighted_phi_kappa(c, fields(c)); }

double weighted_margin(const RadialCurve& c, const CurveFields& f)
{
    require_convex(f, "weighted_margin");
    const double L = length(c, f);
    const double A = area(c, f);
    return weighted_phi_kappa(c, f) - (L * L - kTwoPi * A) / kTwoPi;
}
double weighted_margin(const RadialCurve& c) { return weighted_margin(c, fields(c)); }

double corollary_margin(const RadialCurve& c, const CurveFields& f)
{
    const int K = c.space().K();
    if (K == 0) throw std::domain_error("corollary_margin is defined only for K = -1 or K = +1");
    require_convex(f, "corollary_margin");
    const double L = length(c, f);
    // phi' is cosh(rho) for K = -1 and cos(rho) for K = +1
    const double weighted = weighted_sum(c, f, [&](std::size_t i) { return f.kappa[i] * f.phi_prime[i]; });
    if (K == -1) return weighted - (kTwoPi + L * L / kTwoPi);
    return (kTwoPi - L * L / kTwoPi) - weighted;
}
double corollary_margin(const RadialCurve& c) { return corollary_margin(c, fields(c)); }

double nonconvex_margin(const RadialCurve& c, const CurveFields& f)
{
    if (c.space().K() != -1) throw std::domain_error("nonconvex_margin is stated for the hyperbolic plane (K = -1)");
    const double A = area(c, f);
    const double lhs = weighted_sum(c, f, [&](std::size_t i) { return f.Phi[i] * std::abs(f.kappa[i]); });
    return lhs - (A + A * A / kTwoPi);
}
double nonconvex_margin(const RadialCurve& c) { return nonconvex_margin(c, fields(c)); }

namespace {

void require_sphere(const RadialCurve& c, const char* what)
{
    if (c.space().K() != 1) throw std::domain_error(std::string(what) + " requires K = +1");
}

/// int kappa x ds in embedded coordinates.
Point3 kappa_moment(const RadialCurve& c, const CurveFields& f)
{
    Point3 v{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto x = embed_unit_sphere(c.space(), c.rho(i), c.theta(i));
        const double w = f.kappa[i] * f.ds_dtheta[i];
        for (int k = 0; k < 3; ++k) v[k] += w * x[k];
    }
    for (double& vk : v) vk *= c.spacing();
    return v;
}

}  // namespace

double gp_functional(const RadialCurve& c, const Point3& y)
{
    require_sphere(c, "gp_functional");
    if (std::abs(std::sqrt(dot(y, y)) - 1.0) > 1e-10) throw std::domain_error("gp_functional: y must be a unit vector");
    const auto f = fields(c);
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto x = embed_unit_sphere(c.space(), c.rho(i), c.theta(i));
        s += f.kappa[i] * dot(x, y) * f.ds_dtheta[i];
    }
    return s * c.spacing();
}

Point3 gp_argmax(const RadialCurve& c)
{
    require_sphere(c, "gp_argmax");
    const auto f = fields(c);
    const auto v = kappa_moment(c, f);
    const double norm = std::sqrt(dot(v, v));
    if (norm <= 1e-12) throw std::domain_error("gp_argmax: int kappa x ds vanishes; maximizer is not unique");
    return {v[0] / norm, v[1] / norm, v[2] / norm};
}

GpCertificate gp_counterexample_gap(const RadialCurve& c)
{
    require_sphere(c, "gp_counterexample_gap");
    const auto f = fields(c);
    if (const double m = min_kappa(f); !(m > 0.0))
        throw std::domain_error("gp_counterexample_gap requires a strictly convex curve; min kappa = " + format_double(m));
    const auto y0 = gp_argmax(c);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (dot(embed_unit_sphere(c.space(), c.rho(i), c.theta(i)), y0) <= 0.0)
            throw std::domain_error("gp_counterexample_gap: curve leaves the open hemisphere about the maximizer");
    }
    const double F = gp_functional(c, y0);
    const double L = length(c, f);
    const double bound = kTwoPi - L * L / kTwoPi;
    return {y0, F, bound, bound - F};
}

GeometryReport make_report(const RadialCurve& c, const CurveFields& f)
{
    GeometryReport r;
    const int K = c.space().K();
    r.L = length(c, f);
    r.A = area(c, f);
    r.deficit = r.L * r.L - 4.0 * kPi * r.A + K * r.A * r.A;
    r.minkowski_residual = minkowski_residual(c, f);
    const double kmin = min_kappa(f);
    if (kmin > 0.0) r.hk_gap = hk_gap(c, f);
    r.weighted_phi_kappa = weighted_phi_kappa(c, f);
    if (kmin >= -kConvexTolerance) r.weighted_margin = r.weighted_phi_kappa - (r.L * r.L - kTwoPi * r.A) / kTwoPi;
    r.monotone_functional = r.weighted_phi_kappa + r.A;
    r.gb_residual = gauss_bonnet_residual(c, f);
    const auto [kmin_it, kmax_it] = std::minmax_element(f.kappa.begin(), f.kappa.end());
    r.kappa_min = *kmin_it;
    r.kappa_max = *kmax_it;
    const auto [rmin_it, rmax_it] = std::minmax_element(c.rho().begin(), c.rho().end());
    r.rho_min = *rmin_it;
    r.rho_max = *rmax_it;
    const auto [umin_it, umax_it] = std::minmax_element(f.u.begin(), f.u.end());
    r.u_min = *umin_it;
    r.u_max = *umax_it;
    r.grad_monitor = gradient_monitor(f);
    return r;
}
GeometryReport make_report(const RadialCurve& c) { return make_report(c, fields(c)); }

const std::vector<std::string>& report_field_names()
{
    static const std::vector<std::string> names{
        "L",         "A",         "deficit", "minkowski_residual", "hk_gap", "weighted_phi_kappa",
        "weighted_margin", "monotone_functional", "gb_residual", "kappa_min", "kappa_max",
        "rho_min",   "rho_max",   "u_min",   "u_max",              "grad_monitor"};
    return names;
}

std::vector<double> report_values(const GeometryReport& r)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    return {r.L,
            r.A,
            r.deficit,
            r.minkowski_residual,
            r.hk_gap.value_or(nan),
            r.weighted_phi_kappa,
            r.weighted_margin.value_or(nan),
            r.monotone_functional,
            r.gb_residual,
            r.kappa_min,
            r.kappa_max,
            r.rho_min,
            r.rho_max,
            r.u_min,
            r.u_max,
            r.grad_monitor};
}

nlohmann::ordered_json to_json(const GeometryReport& r)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    const auto& names = report_field_names();
    const auto values = report_values(r);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (std::isnan(values[i]))
            j[names[i]] = nullptr;
        else
            j[names[i]] = values[i];
    }
    return j;
}

std::string report_csv_row(const GeometryReport& r)
{
    std::string row;
    bool first = true;
    for (double v : report_values(r)) {
        if (!first) row += ',';
        first = false;
        if (!std::isnan(v)) row += format_double(v);
    }
    return row;
}

}  // namespace icflow
