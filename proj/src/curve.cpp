#include "icflow/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace icflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::string RadialCurve::check(const SpaceForm& sf, std::span<const double> rho, int stencil_order)
{
    if (stencil_order != 2 && stencil_order != 4) return "stencil order must be 2 or 4";
    if (rho.size() < 16 || rho.size() % 2 != 0)
        return "grid size must be even and at least 16, got " + std::to_string(rho.size());
    const double r_adm = sf.r_admissible();
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double r = rho[i];
        if (!std::isfinite(r) || r <= 0.0)
            return "radius at node " + std::to_string(i) + " is not positive (" + format_double(r) + ")";
        if (r >= r_adm)
            return "radius at node " + std::to_string(i) + " = " + format_double(r) +
                   " reaches r_max = pi/2 (pole margin " + format_double(kPoleMargin) + ")";
    }
    return {};
}

RadialCurve::RadialCurve(SpaceForm sf, std::vector<double> rho, int stencil_order)
    : sf_(sf), rho_(std::move(rho)), order_(stencil_order)
{
    if (auto why = check(sf_, rho_, order_); !why.empty()) throw std::domain_error("invalid curve: " + why);
}

double RadialCurve::spacing() const noexcept { return kTwoPi / static_cast<double>(rho_.size()); }

double RadialCurve::theta(std::size_t i) const noexcept { return kTwoPi * static_cast<double>(i) / static_cast<double>(rho_.size()); }

Derivatives periodic_derivatives(std::span<const double> f, double h, int order)
{
    const std::size_t n = f.size();
    Derivatives d{std::vector<double>(n), std::vector<double>(n)};
    // i + n + off >= 0 since |off| <= 2 < n; unsigned wrap-around gives the right index
    const auto at = [&](std::size_t i, int off) { return f[(i + n + static_cast<std::size_t>(off)) % n]; };
    if (order == 2) {
        const double c1 = 1.0 / (2.0 * h);
        const double c2 = 1.0 / (h * h);
        for (std::size_t i = 0; i < n; ++i) {
            const double fm = at(i, -1), fp = at(i, 1);
            d.d1[i] = (fp - fm) * c1;
            d.d2[i] = (fp - 2.0 * f[i] + fm) * c2;
        }
    } else if (order == 4) {
        const double c1 = 1.0 / (12.0 * h);
        const double c2 = 1.0 / (12.0 * h * h);
        for (std::size_t i = 0; i < n; ++i) {
            const double fm2 = at(i, -2), fm1 = at(i, -1), fp1 = at(i, 1), fp2 = at(i, 2);
            d.d1[i] = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) * c1;
            d.d2[i] = (-fp2 + 16.0 * fp1 - 30.0 * f[i] + 16.0 * fm1 - fm2) * c2;
        }
    } else {
        throw std::invalid_argument("stencil order must be 2 or 4");
    }
    return d;
}

Derivatives derivatives(const RadialCurve& c) { return periodic_derivatives(c.rho(), c.spacing(), c.stencil_order()); }

CurveFields fields(const RadialCurve& c)
{
    const std::size_t n = c.size();
    auto [d1, d2] = derivatives(c);
    CurveFields f;
    f.kappa.resize(n);
    f.u.resize(n);
    f.ds_dtheta.resize(n);
    f.phi.resize(n);
    f.phi_prime.resize(n);
    f.Phi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto w = c.space().warp_unchecked(c.rho(i));
        const double p = d1[i], q = d2[i];
        const double g2 = w.phi * w.phi + p * p;
        const double g = std::sqrt(g2);
        f.kappa[i] = (w.phi * w.phi * w.phi_prime + 2.0 * p * p * w.phi_prime - q * w.phi) / (g2 * g);
        f.u[i] = w.phi * w.phi / g;
        f.ds_dtheta[i] = g;
        f.phi[i] = w.phi;
        f.phi_prime[i] = w.phi_prime;
        f.Phi[i] = w.Phi;
    }
    f.rho_t1 = std::move(d1);
    f.rho_t2 = std::move(d2);
    return f;
}

double periodic_sum(std::span<const double> values, double h)
{
    double s = 0.0;
    for (double v : values) s += v;
    return s * h;
}

double length(const RadialCurve& c, const CurveFields& f) { return periodic_sum(f.ds_dtheta, c.spacing()); }
double length(const RadialCurve& c) { return length(c, fields(c)); }

double area(const RadialCurve& c, const CurveFields& f) { return periodic_sum(f.Phi, c.spacing()); }
double area(const RadialCurve& c)
{
    double s = 0.0;
    for (double r : c.rho()) s += c.space().warp_unchecked(r).Phi;
    return s * c.spacing();
}

double gauss_bonnet_residual(const RadialCurve& c, const CurveFields& f)
{
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += f.kappa[i] * f.ds_dtheta[i];
    return s * c.spacing() + c.space().K() * area(c, f) - kTwoPi;
}
double gauss_bonnet_residual(const RadialCurve& c) { return gauss_bonnet_residual(c, fields(c)); }

ConvexityCheck is_strictly_convex(const CurveFields& f)
{
    const double m = *std::min_element(f.kappa.begin(), f.kappa.end());
    return {m > 0.0, m};
}
ConvexityCheck is_strictly_convex(const RadialCurve& c) { return is_strictly_convex(fields(c)); }

double gradient_monitor(const CurveFields& f)
{
    double m = 0.0;
    for (std::size_t i = 0; i < f.phi.size(); ++i) m = std::max(m, std::abs(f.rho_t1[i]) / f.phi[i]);
    return m;
}
double gradient_monitor(const RadialCurve& c)
{
    const auto d = derivatives(c);
    double m = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        m = std::max(m, std::abs(d.d1[i]) / c.space().warp_unchecked(c.rho(i)).phi);
    return m;
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_curve_csv(std::ostream& os, const RadialCurve& c)
{
    os << "# K=" << c.space().K() << " N=" << c.size() << '\n';
    os << "theta,rho\n";
    for (std::size_t i = 0; i < c.size(); ++i) os << format_double(c.theta(i)) << ',' << format_double(c.rho(i)) << '\n';
}

RadialCurve read_curve_csv(std::istream& is, int stencil_order)
{
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("curve csv: empty input");
    int K = 0;
    long n = 0;
    if (std::sscanf(line.c_str(), "# K=%d N=%ld", &K, &n) != 2 || n <= 0)
        throw std::runtime_error("curve csv: malformed header '" + line + "'");
    if (!std::getline(is, line) || line.rfind("theta,rho", 0) != 0)
        throw std::runtime_error("curve csv: missing 'theta,rho' column header");
    std::vector<double> rho;
    rho.reserve(static_cast<std::size_t>(n));
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("curve csv: malformed row '" + line + "'");
        char* end = nullptr;
        const double r = std::strtod(line.c_str() + comma + 1, &end);
        if (end == line.c_str() + comma + 1) throw std::runtime_error("curve csv: bad radius in '" + line + "'");
        rho.push_back(r);
    }
    if (rho.size() != static_cast<std::size_t>(n))
        throw std::runtime_error("curve csv: header says N=" + std::to_string(n) + " but found " +
                                 std::to_string(rho.size()) + " rows");
    return RadialCurve(SpaceForm(K), std::move(rho), stencil_order);
}

}  // namespace icflow
