#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "icflow/curve.hpp"
#include "icflow/rng.hpp"

namespace icflow {

struct FourierMode {
    int m;
    double a;  ///< cos coefficient
    double b;  ///< sin coefficient
};

enum class CurveKind {
    Circle,   ///< rho = r0
    Fourier,  ///< rho = r0 (1 + sum a_m cos m theta + b_m sin m theta)
    Ellipse,  ///< plane only: rho = ab / sqrt(b^2 cos^2 + a^2 sin^2)
    Random,   ///< Fourier with seeded coefficients, rejected until the shape test passes
    Kink,     ///< rho = r0 (1 + amplitude |cos theta|); non-smooth negative control
};

enum class RandomShape {
    Convex,     ///< |a_m|, |b_m| <= 0.3 / m^3 for 1 <= m <= 8; strictly convex
    NonConvex,  ///< |a_m|, |b_m| <= 0.4 / m for 2 <= m <= 8; some kappa < 0
};

struct CurveSpec {
    CurveKind kind = CurveKind::Circle;
    double r0 = 1.0;
    std::vector<FourierMode> modes;
    double a = 2.0, b = 1.0;  ///< ellipse semi-axes along theta = 0 and theta = pi/2
    double amplitude = 0.2;   ///< kink
    std::uint64_t seed = 0;
    RandomShape shape = RandomShape::Convex;
};

CurveKind parse_curve_kind(std::string_view name);
std::string_view to_string(CurveKind kind) noexcept;

inline constexpr int kMaxRejections = 1000;

/// Builds the curve; random kinds draw from SplitMix64(spec.seed).
RadialCurve generate(const CurveSpec& spec, const SpaceForm& sf, std::size_t N, int stencil_order = 4);

/// Draws one random curve from an existing stream, so sweeps consume a single
/// generator in index order.
RadialCurve generate_random(SplitMix64& rng, RandomShape shape, double r0, const SpaceForm& sf, std::size_t N,
                            int stencil_order = 4);

/// rho = r0 + eps cos(m theta), the perturbed circle used for the sphere
/// counterexample and for decay-rate runs.
RadialCurve perturbed_circle(const SpaceForm& sf, std::size_t N, double r0, double eps, int m, int stencil_order = 4);

}  // namespace icflow
