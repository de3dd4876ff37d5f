#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "icflow/space_form.hpp"

namespace icflow {

/// Star-shaped closed curve stored as radii rho_i sampled at theta_i = 2*pi*i/N.
///
/// Index arithmetic is periodic. The value is immutable after construction;
/// the constructor enforces N even and >= 16, rho_i > 0 and, in the
/// hemisphere, rho_i below pi/2 minus the pole margin.
class RadialCurve {
public:
    RadialCurve(SpaceForm sf, std::vector<double> rho, int stencil_order = 4);

    const SpaceForm& space() const noexcept { return sf_; }
    std::span<const double> rho() const noexcept { return rho_; }
    double rho(std::size_t i) const noexcept { return rho_[i]; }
    std::size_t size() const noexcept { return rho_.size(); }
    int stencil_order() const noexcept { return order_; }
    double spacing() const noexcept;
    double theta(std::size_t i) const noexcept;

    /// Same space form and stencil, new radii (validated).
    RadialCurve with_rho(std::vector<double> rho) const { return RadialCurve(sf_, std::move(rho), order_); }

    /// Empty string when (sf, rho, order) would form a valid curve, else the reason.
    static std::string check(const SpaceForm& sf, std::span<const double> rho, int stencil_order);

    friend bool operator==(const RadialCurve&, const RadialCurve&) = default;

private:
    SpaceForm sf_;
    std::vector<double> rho_;
    int order_;
};

struct Derivatives {
    std::vector<double> d1;  ///< rho_theta
    std::vector<double> d2;  ///< rho_thetatheta
};

/// Periodic central differences of order 2 or 4 on a uniform grid of spacing h.
Derivatives periodic_derivatives(std::span<const double> f, double h, int order);

Derivatives derivatives(const RadialCurve& c);

/// Pointwise geometry of a radial graph.
struct CurveFields {
    std::vector<double> rho_t1;
    std::vector<double> rho_t2;
    std::vector<double> kappa;      ///< geodesic curvature w.r.t. the outward normal
    std::vector<double> u;          ///< support function <V, nu>
    std::vector<double> ds_dtheta;  ///< sqrt(phi^2 + rho_theta^2)
    std::vector<double> phi;
    std::vector<double> phi_prime;
    std::vector<double> Phi;
};

CurveFields fields(const RadialCurve& c);

/// Periodic trapezoid rule: h * sum(values).
double periodic_sum(std::span<const double> values, double h);

double length(const RadialCurve& c);
double length(const RadialCurve& c, const CurveFields& f);

/// Enclosed area, the integral over theta of Phi(rho).
double area(const RadialCurve& c);
double area(const RadialCurve& c, const CurveFields& f);

/// int kappa ds + K*A - 2*pi.
double gauss_bonnet_residual(const RadialCurve& c);
double gauss_bonnet_residual(const RadialCurve& c, const CurveFields& f);

struct ConvexityCheck {
    bool strictly_convex;
    double margin;  ///< min_i kappa_i
};

ConvexityCheck is_strictly_convex(const RadialCurve& c);
ConvexityCheck is_strictly_convex(const CurveFields& f);

/// max_i |rho_theta| / phi(rho); vanishes only for constant rho.
double gradient_monitor(const RadialCurve& c);
double gradient_monitor(const CurveFields& f);

/// Curve CSV: "# K=<k> N=<n>" then "theta,rho" then N rows, 17 significant digits.
void write_curve_csv(std::ostream& os, const RadialCurve& c);
RadialCurve read_curve_csv(std::istream& is, int stencil_order = 4);

/// "%.17g" formatting shared by every text writer.
std::string format_double(double v);

}  // namespace icflow
