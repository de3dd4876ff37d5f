#pragma once

#include <array>
#include <limits>

namespace icflow {

/// Distance below pi/2 that radii in the hemisphere (K = +1) must keep.
inline constexpr double kPoleMargin = 1e-6;

/// Values of the warp function phi and its relatives at one radius.
struct Warp {
    double phi;        ///< phi(r): sinh r, r, or sin r
    double phi_prime;  ///< phi'(r)
    double Phi;        ///< potential, integral of phi from 0 to r
};

using Point3 = std::array<double, 3>;

/// Simply connected surface of constant curvature K in {-1, 0, +1}, written
/// as the warped product dr^2 + phi(r)^2 dtheta^2 about a fixed origin.
class SpaceForm {
public:
    /// Throws std::domain_error unless K is -1, 0 or +1.
    explicit SpaceForm(int K);

    int K() const noexcept { return K_; }

    /// Open upper bound on admissible radii: pi/2 for the hemisphere, +inf otherwise.
    double r_max() const noexcept;

    /// Largest radius a curve may reach; r_max minus the pole margin for K = +1.
    double r_admissible() const noexcept;

    bool admissible(double r) const noexcept { return r >= 0.0 && r < r_admissible(); }

    Warp warp(double r) const;

    /// Unchecked variant used in inner loops; callers guarantee 0 <= r < r_max.
    Warp warp_unchecked(double r) const noexcept;

    /// phi and phi' only, for the flow kernels.
    void warp_pair(double r, double& phi, double& phi_prime) const noexcept;

    /// Unique r in (0, r_max) with phi(r) = ell.
    double inverse_warp(double ell) const;

    /// Radius of the centered geodesic circle with circumference L.
    double circle_radius_for_length(double L) const;

    friend bool operator==(const SpaceForm&, const SpaceForm&) = default;

private:
    int K_;
};

/// Point of the unit sphere in R^3 at geodesic distance r from the north
/// pole (0, 0, 1) and azimuth theta.
Point3 embed_unit_sphere(const SpaceForm& sf, double r, double theta);

inline double dot(const Point3& a, const Point3& b) noexcept
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

}  // namespace icflow
