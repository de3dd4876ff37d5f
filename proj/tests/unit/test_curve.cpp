#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../oracles.hpp"
#include "icflow/curve.hpp"
#include "icflow/generate.hpp"
#include "icflow/rng.hpp"

using namespace icflow;
using doctest::Approx;

namespace {

RadialCurve circle(int K, double r, std::size_t N = 256, int order = 4)
{
    return RadialCurve(SpaceForm(K), std::vector<double>(N, r), order);
}

RadialCurve ellipse(std::size_t N, int order = 4)
{
    CurveSpec spec;
    spec.kind = CurveKind::Ellipse;
    return generate(spec, SpaceForm(0), N, order);
}

}  // namespace

TEST_CASE("construction rejects degenerate grids and radii")
{
    const SpaceForm s(0);
    CHECK_THROWS(RadialCurve(s, std::vector<double>(15, 1.0)));
    CHECK_THROWS(RadialCurve(s, std::vector<double>(17, 1.0)));
    CHECK_THROWS(RadialCurve(s, std::vector<double>(16, 1.0), 3));
    CHECK_THROWS(RadialCurve(s, std::vector<double>(16, -1.0)));
    CHECK_THROWS(RadialCurve(s, std::vector<double>(16, std::nan(""))));
    CHECK_THROWS(RadialCurve(SpaceForm(1), std::vector<double>(16, 1.6)));
    CHECK(RadialCurve::check(SpaceForm(1), std::vector<double>(16, 1.6), 4).find("r_max") != std::string::npos);
    CHECK_NOTHROW(RadialCurve(s, std::vector<double>(16, 1.0)));
}

TEST_CASE("derivatives")
{
    const auto c = circle(0, 1.3);
    const auto d = derivatives(c);
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(std::abs(d.d1[i]) <= 1e-12);
        CHECK(std::abs(d.d2[i]) <= 1e-12);
    }
    // rho = cos theta shifted to stay positive; the shift does not change derivatives
    const std::size_t N = 256;
    std::vector<double> rho(N);
    for (std::size_t i = 0; i < N; ++i) rho[i] = 2.0 + std::cos(2 * oracle::pi * i / N);
    const RadialCurve c4(SpaceForm(0), rho, 4), c2(SpaceForm(0), rho, 2);
    const auto d4 = derivatives(c4), d2 = derivatives(c2);
    const double h = 2 * oracle::pi / N;
    double e4 = 0, e2 = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double th = c4.theta(i);
        e4 = std::max(e4, std::abs(d4.d1[i] + std::sin(th)));
        e2 = std::max(e2, std::abs(d2.d1[i] + std::sin(th)));
    }
    // leading truncation terms h^4/30 and h^2/6 for unit-amplitude cos
    CHECK(e4 <= 1.25e-8);
    CHECK(e4 == Approx(std::pow(h, 4) / 30).epsilon(1e-3));
    CHECK(e2 == Approx(h * h / 6).epsilon(1e-3));
}

TEST_CASE("circle fields")
{
    const auto f = fields(circle(-1, 1.0));
    for (std::size_t i = 0; i < f.kappa.size(); ++i) {
        CHECK(f.kappa[i] == Approx(1.313035).epsilon(1e-6));
        CHECK(f.u[i] == Approx(1.175201).epsilon(1e-6));
    }
    for (int K : {-1, 0, 1}) {
        const double r = 0.7;
        const auto c = circle(K, r, 64);
        const auto w = oracle::warp(K, r);
        const auto ff = fields(c);
        CHECK(ff.kappa[5] == Approx(w.dphi / w.phi).epsilon(1e-9));
        CHECK(length(c) == Approx(2 * oracle::pi * w.phi).epsilon(1e-9));
        CHECK(area(c) == Approx(2 * oracle::pi * w.Phi).epsilon(1e-9));
        CHECK(std::abs(gauss_bonnet_residual(circle(K, r))) <= 1e-10);
        const double L = length(c), A = area(c);
        CHECK(std::abs(L * L - 4 * oracle::pi * A + K * A * A) <= 1e-8 * L * L);
    }
}

TEST_CASE("ellipse fields against the parametric oracle")
{
    const oracle::Ellipse E;
    const auto c = ellipse(1024);
    const auto f = fields(c);
    CHECK(std::abs(f.kappa[0] - 2.0) <= 1e-6);
    CHECK(f.u[0] == Approx(2.0).epsilon(1e-12));
    const auto conv = is_strictly_convex(f);
    CHECK(conv.strictly_convex);
    CHECK(conv.margin == Approx(0.25).epsilon(1e-4));
    CHECK(std::abs(length(c) - E.perimeter()) <= 1e-4);
    CHECK(E.perimeter() == Approx(9.688448220547675).epsilon(1e-13));
    CHECK(std::abs(length(c) - 9.688448) <= 1e-4);
    CHECK(std::abs(area(c) - E.area()) <= 1e-5);
}

TEST_CASE("Gauss-Bonnet residual refines at the stencil order")
{
    for (int p : {2, 4}) {
        const double r1 = std::abs(gauss_bonnet_residual(ellipse(512, p)));
        const double r2 = std::abs(gauss_bonnet_residual(ellipse(1024, p)));
        CHECK(std::log2(r1 / r2) == Approx(p).epsilon(0.1));
    }
    SplitMix64 rng(11);
    for (int k = 0; k < 5; ++k) {
        const auto c = generate_random(rng, RandomShape::Convex, 1.0, SpaceForm(-1), 1024);
        CHECK(std::abs(gauss_bonnet_residual(c)) <= 1e-6);
    }
}

TEST_CASE("convexity")
{
    std::vector<double> rho(256);
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = 1.0 + 0.5 * std::cos(3 * 2 * oracle::pi * i / rho.size());
    CHECK_FALSE(is_strictly_convex(RadialCurve(SpaceForm(0), rho)).strictly_convex);
    const auto c = circle(1, 0.5);
    CHECK(is_strictly_convex(c).margin == Approx(std::cos(0.5) / std::sin(0.5)).epsilon(1e-12));
}

TEST_CASE("gradient monitor")
{
    CHECK(gradient_monitor(circle(1, 0.4)) <= 1e-12);
    const std::size_t N = 1024;
    std::vector<double> rho(N);
    for (std::size_t i = 0; i < N; ++i) rho[i] = 1.0 + 0.1 * std::cos(2 * oracle::pi * i / N);
    // dense oracle for max |0.1 sin t| / (1 + 0.1 cos t)
    double best = 0.0;
    for (int k = 0; k < 200000; ++k) {
        const double t = 2 * oracle::pi * k / 200000;
        best = std::max(best, std::abs(0.1 * std::sin(t)) / (1.0 + 0.1 * std::cos(t)));
    }
    const RadialCurve c(SpaceForm(0), rho);
    CHECK(gradient_monitor(c) == Approx(best).epsilon(1e-4));
    CHECK(best == Approx(0.100504).epsilon(1e-5));
    std::vector<double> scaled(rho);
    for (auto& r : scaled) r *= 3.7;
    CHECK(gradient_monitor(RadialCurve(SpaceForm(0), scaled)) == Approx(gradient_monitor(c)).epsilon(1e-13));
}

TEST_CASE("curve CSV round-trips bit for bit")
{
    SplitMix64 rng(99);
    for (int K : {-1, 0, 1}) {
        for (int k = 0; k < 10; ++k) {
            const auto c = generate_random(rng, RandomShape::Convex, 0.9, SpaceForm(K), 64);
            std::stringstream ss;
            write_curve_csv(ss, c);
            const auto back = read_curve_csv(ss);
            CHECK(back == c);
        }
    }
    std::istringstream bad("# K=0 N=16\ntheta,rho\n0,1\n");
    CHECK_THROWS(read_curve_csv(bad));
}
