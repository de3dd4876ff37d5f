#include "icflow/generate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "icflow/rng.hpp"

namespace icflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> theta_grid(std::size_t N)
{
    std::vector<double> th(N);
    for (std::size_t i = 0; i < N; ++i) th[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(N);
    return th;
}

std::vector<double> fourier_radii(double r0, const std::vector<FourierMode>& modes, std::size_t N)
{
    const auto th = theta_grid(N);
    std::vector<double> rho(N);
    for (std::size_t i = 0; i < N; ++i) {
        double s = 1.0;
        for (const auto& md : modes) s += md.a * std::cos(md.m * th[i]) + md.b * std::sin(md.m * th[i]);
        rho[i] = r0 * s;
    }
    return rho;
}

RadialCurve checked(const SpaceForm& sf, std::vector<double> rho, int order)
{
    if (auto why = RadialCurve::check(sf, rho, order); !why.empty())
        throw std::domain_error("generated curve is invalid: " + why);
    return RadialCurve(sf, std::move(rho), order);
}

}  // namespace

CurveKind parse_curve_kind(std::string_view name)
{
    if (name == "circle") return CurveKind::Circle;
    if (name == "fourier") return CurveKind::Fourier;
    if (name == "ellipse") return CurveKind::Ellipse;
    if (name == "random") return CurveKind::Random;
    if (name == "kink") return CurveKind::Kink;
    throw std::invalid_argument("unknown curve kind '" + std::string(name) + "'");
}

std::string_view to_string(CurveKind kind) noexcept
{
    switch (kind) {
    case CurveKind::Circle: return "circle";
    case CurveKind::Fourier: return "fourier";
    case CurveKind::Ellipse: return "ellipse";
    case CurveKind::Random: return "random";
    case CurveKind::Kink: return "kink";
    }
    return "?";
}

RadialCurve generate_random(SplitMix64& rng, RandomShape shape, double r0, const SpaceForm& sf, std::size_t N,
                            int stencil_order)
{
    const int m_lo = shape == RandomShape::Convex ? 1 : 2;
    constexpr int m_hi = 8;
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        std::vector<FourierMode> modes;
        for (int m = m_lo; m <= m_hi; ++m) {
            const double bound = shape == RandomShape::Convex ? 0.3 / (m * m * m) : 0.4 / m;
            const double a = rng.uniform(-bound, bound);
            const double b = rng.uniform(-bound, bound);
            modes.push_back({m, a, b});
        }
        auto rho = fourier_radii(r0, modes, N);
        if (!RadialCurve::check(sf, rho, stencil_order).empty()) continue;
        RadialCurve c(sf, std::move(rho), stencil_order);
        const auto conv = is_strictly_convex(c);
        if ((shape == RandomShape::Convex) == conv.strictly_convex) return c;
    }
    throw std::runtime_error("random curve sampler rejected " + std::to_string(kMaxRejections) + " candidates");
}

RadialCurve generate(const CurveSpec& spec, const SpaceForm& sf, std::size_t N, int stencil_order)
{
    if (!(spec.r0 > 0.0)) throw std::domain_error("r0 must be positive");
    switch (spec.kind) {
    case CurveKind::Circle: return checked(sf, std::vector<double>(N, spec.r0), stencil_order);
    case CurveKind::Fourier: return checked(sf, fourier_radii(spec.r0, spec.modes, N), stencil_order);
    case CurveKind::Ellipse: {
        if (sf.K() != 0) throw std::domain_error("ellipse curves are defined in the plane only (K = 0)");
        if (!(spec.a > 0.0 && spec.b > 0.0)) throw std::domain_error("ellipse semi-axes must be positive");
        const auto th = theta_grid(N);
        std::vector<double> rho(N);
        for (std::size_t i = 0; i < N; ++i) {
            const double c = std::cos(th[i]), s = std::sin(th[i]);
            rho[i] = spec.a * spec.b / std::sqrt(spec.b * spec.b * c * c + spec.a * spec.a * s * s);
        }
        return checked(sf, std::move(rho), stencil_order);
    }
    case CurveKind::Random: {
        SplitMix64 rng(spec.seed);
        return generate_random(rng, spec.shape, spec.r0, sf, N, stencil_order);
    }
    case CurveKind::Kink: {
        const auto th = theta_grid(N);
        std::vector<double> rho(N);
        for (std::size_t i = 0; i < N; ++i) rho[i] = spec.r0 * (1.0 + spec.amplitude * std::abs(std::cos(th[i])));
        return checked(sf, std::move(rho), stencil_order);
    }
    }
    throw std::logic_error("unhandled curve kind");
}

RadialCurve perturbed_circle(const SpaceForm& sf, std::size_t N, double r0, double eps, int m, int stencil_order)
{
    std::vector<double> rho(N);
    for (std::size_t i = 0; i < N; ++i)
        rho[i] = r0 + eps * std::cos(m * kTwoPi * static_cast<double>(i) / static_cast<double>(N));
    return checked(sf, std::move(rho), stencil_order);
}

}  // namespace icflow
