#include "icflow/space_form.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace icflow {

SpaceForm::SpaceForm(int K) : K_(K)
{
    if (K != -1 && K != 0 && K != 1)
        throw std::domain_error("space form curvature must be -1, 0 or 1, got " + std::to_string(K));
}

double SpaceForm::r_max() const noexcept
{
    return K_ == 1 ? std::numbers::pi / 2 : std::numeric_limits<double>::infinity();
}

double SpaceForm::r_admissible() const noexcept
{
    return K_ == 1 ? std::numbers::pi / 2 - kPoleMargin : std::numeric_limits<double>::infinity();
}

Warp SpaceForm::warp_unchecked(double r) const noexcept
{
    switch (K_) {
    case -1: return {std::sinh(r), std::cosh(r), std::cosh(r) - 1.0};
    case 1: {
        // 2 sin^2(r/2) avoids cancellation in 1 - cos r near the pole
        const double s = std::sin(0.5 * r);
        return {std::sin(r), std::cos(r), 2.0 * s * s};
    }
    default: return {r, 1.0, 0.5 * r * r};
    }
}

void SpaceForm::warp_pair(double r, double& phi, double& phi_prime) const noexcept
{
    switch (K_) {
    case -1:
        if (r > 0.5) {
            // one exp instead of sinh and cosh; no cancellation at this size
            const double e = std::exp(r), ei = 1.0 / e;
            phi = 0.5 * (e - ei);
            phi_prime = 0.5 * (e + ei);
        } else {
            phi = std::sinh(r);
            phi_prime = std::cosh(r);
        }
        return;
    case 1:
        phi = std::sin(r);
        phi_prime = std::cos(r);
        return;
    default:
        phi = r;
        phi_prime = 1.0;
    }
}

Warp SpaceForm::warp(double r) const
{
    if (!(r >= 0.0) || r >= r_max())
        throw std::domain_error("radius " + std::to_string(r) + " outside [0, r_max) with r_max = " +
                                std::to_string(r_max()));
    return warp_unchecked(r);
}

double SpaceForm::inverse_warp(double ell) const
{
    if (!(ell > 0.0) || (K_ == 1 && ell >= 1.0) || !std::isfinite(ell))
        throw std::domain_error("inverse_warp: value " + std::to_string(ell) + " outside the range of phi");
    switch (K_) {
    case -1: return std::asinh(ell);
    case 1: return std::asin(ell);
    default: return ell;
    }
}

double SpaceForm::circle_radius_for_length(double L) const
{
    return inverse_warp(L / (2.0 * std::numbers::pi));
}

Point3 embed_unit_sphere(const SpaceForm& sf, double r, double theta)
{
    if (sf.K() != 1) throw std::domain_error("embed_unit_sphere requires K = +1");
    if (!(r >= 0.0) || r >= sf.r_max())
        throw std::domain_error("embed_unit_sphere: radius outside the open hemisphere");
    const double s = std::sin(r);
    return {s * std::cos(theta), s * std::sin(theta), std::cos(r)};
}

}  // namespace icflow
