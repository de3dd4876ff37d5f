#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "icflow/curve.hpp"

namespace icflow {

/// Curves with min kappa in (-kConvexTolerance, 0] count as weakly convex.
inline constexpr double kConvexTolerance = 1e-10;

/// Acceptance slack for inequality margins on a curve of length L.
double quadrature_tolerance(double L);

/// int (phi'(rho) - kappa u) ds; an identity, so it vanishes as the grid is refined.
double minkowski_residual(const RadialCurve& c);
double minkowski_residual(const RadialCurve& c, const CurveFields& f);

/// int (phi'/kappa - u) ds, nonnegative on strictly convex curves and zero only
/// on centered geodesic circles. Throws std::domain_error if min kappa <= 0.
double hk_gap(const RadialCurve& c);
double hk_gap(const RadialCurve& c, const CurveFields& f);

/// int Phi(rho) kappa ds.
double weighted_phi_kappa(const RadialCurve& c);
double weighted_phi_kappa(const RadialCurve& c, const CurveFields& f);

/// int Phi kappa ds - (L^2 - 2 pi A) / (2 pi). Requires a convex curve.
double weighted_margin(const RadialCurve& c);
double weighted_margin(const RadialCurve& c, const CurveFields& f);

/// Hyperbolic: int kappa cosh(rho) ds - (2 pi + L^2/(2 pi)).
/// Hemisphere: (2 pi - L^2/(2 pi)) - int kappa cos(rho) ds.
/// Both are nonnegative on convex curves; undefined in the plane.
double corollary_margin(const RadialCurve& c);
double corollary_margin(const RadialCurve& c, const CurveFields& f);

/// int Phi |kappa| ds - (A + A^2/(2 pi)) for simple curves in the hyperbolic plane;
/// convexity is not required.
double nonconvex_margin(const RadialCurve& c);
double nonconvex_margin(const RadialCurve& c, const CurveFields& f);

/// F(y) = int kappa(x) <x, y> ds with x the curve embedded in the unit sphere.
double gp_functional(const RadialCurve& c, const Point3& y);

/// Maximizer of gp_functional over the unit sphere: the direction of int kappa x ds.
Point3 gp_argmax(const RadialCurve& c);

struct GpCertificate {
    Point3 y0;
    double F;      ///< gp_functional at y0
    double bound;  ///< 2 pi - L^2 / (2 pi)
    double gap;    ///< bound - F; positive means the sup-bound fails for this curve
};

/// Evaluates the Lagrange maximizer and how far its value falls short of
/// 2 pi - L^2/(2 pi). Requires K = +1, strict convexity, and the curve inside
/// the open hemisphere centred at y0.
GpCertificate gp_counterexample_gap(const RadialCurve& c);

/// Every scalar functional of one curve.
///
/// hk_gap and weighted_margin are empty when the curve is not (weakly) convex.
struct GeometryReport {
    double L = 0;
    double A = 0;
    double deficit = 0;  ///< L^2 - 4 pi A + K A^2
    double minkowski_residual = 0;
    std::optional<double> hk_gap;
    double weighted_phi_kappa = 0;
    std::optional<double> weighted_margin;
    double monotone_functional = 0;  ///< int Phi kappa ds + A
    double gb_residual = 0;
    double kappa_min = 0, kappa_max = 0;
    double rho_min = 0, rho_max = 0;
    double u_min = 0, u_max = 0;
    double grad_monitor = 0;
};

GeometryReport make_report(const RadialCurve& c);
GeometryReport make_report(const RadialCurve& c, const CurveFields& f);

/// Field names in serialization order.
const std::vector<std::string>& report_field_names();

/// Values in report_field_names() order; NaN stands for an empty optional.
std::vector<double> report_values(const GeometryReport& r);

nlohmann::ordered_json to_json(const GeometryReport& r);

/// Comma-joined "%.17g" values; empty optionals become empty cells.
std::string report_csv_row(const GeometryReport& r);

}  // namespace icflow
