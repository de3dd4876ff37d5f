#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "../oracles.hpp"
#include "icflow/functionals.hpp"
#include "icflow/generate.hpp"

using namespace icflow;
using doctest::Approx;

namespace {

RadialCurve circle(int K, double r, std::size_t N = 256)
{
    return RadialCurve(SpaceForm(K), std::vector<double>(N, r));
}

RadialCurve ellipse(std::size_t N)
{
    CurveSpec spec;
    spec.kind = CurveKind::Ellipse;
    return generate(spec, SpaceForm(0), N);
}

RadialCurve sampled(int K, const oracle::Radial& r, std::size_t N)
{
    std::vector<double> rho(N);
    for (std::size_t i = 0; i < N; ++i) rho[i] = r.r(2 * oracle::pi * i / N);
    return RadialCurve(SpaceForm(K), rho);
}

}  // namespace

TEST_CASE("equality cases on centered circles")
{
    for (int K : {-1, 0, 1}) {
        const auto c = circle(K, K == 1 ? 0.5 : 1.0);
        CHECK(std::abs(minkowski_residual(c)) <= 1e-12);
        CHECK(std::abs(hk_gap(c)) <= 1e-10);
        CHECK(std::abs(weighted_margin(c)) <= 1e-8);
        if (K != 0) CHECK(std::abs(corollary_margin(c)) <= 1e-8);
        if (K == -1) CHECK(std::abs(nonconvex_margin(c)) <= 1e-8);
    }
    CHECK_THROWS_AS(corollary_margin(circle(0, 1.0)), std::domain_error);
    CHECK_THROWS_AS(nonconvex_margin(circle(0, 1.0)), std::domain_error);
}

TEST_CASE("ellipse functionals against the parametric oracle")
{
    const oracle::Ellipse E;
    CHECK(E.hk_gap() == Approx(3.375 * oracle::pi).epsilon(1e-13));
    CHECK(E.weighted_phi_kappa() == Approx(3 * oracle::pi).epsilon(1e-13));
    const auto c = ellipse(1024);
    CHECK(std::abs(hk_gap(c) - E.hk_gap()) <= 1e-3);
    CHECK(std::abs(hk_gap(c) - 10.602875) <= 1e-3);
    CHECK(std::abs(weighted_phi_kappa(c) - E.weighted_phi_kappa()) <= 1e-6);
    CHECK(std::abs(weighted_margin(c) - E.weighted_margin()) <= 1e-6);
    CHECK(E.weighted_margin() == Approx(0.7687208).epsilon(1e-6));
    CHECK(std::abs(minkowski_residual(ellipse(512))) <= 1e-6);
}

TEST_CASE("off-center circle")
{
    const double R = 1.0, e = 0.2;
    const oracle::Radial r{[=](double t) { return e * std::cos(t) + std::sqrt(R * R - e * e * std::sin(t) * std::sin(t)); },
                           nullptr, nullptr};
    const auto c = sampled(0, r, 512);
    // the gap is translation invariant in the plane, the weighted margin is not
    CHECK(std::abs(hk_gap(c)) <= 1e-8);
    CHECK(weighted_margin(c) > 1e-4);
}

TEST_CASE("hk_gap needs positive curvature")
{
    std::vector<double> rho(256);
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = 1.0 + 0.5 * std::cos(3 * 2 * oracle::pi * i / rho.size());
    const RadialCurve c(SpaceForm(0), rho);
    CHECK_THROWS_AS(hk_gap(c), std::domain_error);
    CHECK_THROWS_AS(weighted_margin(c), std::domain_error);
    const auto r = make_report(c);
    CHECK_FALSE(r.hk_gap.has_value());
    CHECK_FALSE(r.weighted_margin.has_value());
}

TEST_CASE("non-convex hyperbolic inequality")
{
    const auto c = sampled(-1, oracle::fourier(1.0, {{4, 0.35, 0}}), 512);
    CHECK_FALSE(is_strictly_convex(c).strictly_convex);
    CHECK(nonconvex_margin(c) > 0.0);
}

TEST_CASE("corollary margin agrees with weighted margin through Gauss-Bonnet")
{
    const auto c = perturbed_circle(SpaceForm(1), 1024, 0.8, 0.05, 2);
    CHECK(corollary_margin(c) > 0.0);
    CHECK(std::abs(corollary_margin(c) - weighted_margin(c)) <= 1e-8);
}

TEST_CASE("GP functional")
{
    const Point3 pole{0, 0, 1};
    const auto c0 = circle(1, 0.8, 512);
    CHECK(gp_functional(c0, pole) == Approx(2 * oracle::pi * std::cos(0.8) * std::cos(0.8)).epsilon(1e-10));
    CHECK(gp_functional(c0, pole) == Approx(3.0498596).epsilon(1e-7));
    const auto y0 = gp_argmax(c0);
    CHECK(std::abs(y0[2] - 1.0) <= 1e-12);

    const auto pert = oracle::perturbed_circle(0.8, 0.05, 2);
    const auto c = perturbed_circle(SpaceForm(1), 2048, 0.8, 0.05, 2);
    CHECK(std::abs(gp_functional(c, pole) - oracle::gp_functional(pert, pole)) <= 1e-8);

    const Point3 y{0.6, 0.0, 0.8}, ny{-0.6, 0.0, -0.8};
    CHECK(gp_functional(c, ny) == Approx(-gp_functional(c, y)).epsilon(1e-14));
    CHECK(std::abs(gp_functional(c, y) - oracle::gp_functional(pert, {0.6, 0.0, 0.8})) <= 1e-8);

    const auto ym = gp_argmax(c);
    CHECK(std::abs(ym[0]) <= 1e-10);
    CHECK(std::abs(ym[1]) <= 1e-10);
    CHECK(std::abs(ym[2] - 1.0) <= 1e-10);

    // brute-force search over the sphere
    const double best = gp_functional(c, ym);
    oracle::Mix rng{2024};
    for (int k = 0; k < 10000; ++k) {
        const double z = 2 * rng.uniform() - 1, phi = 2 * oracle::pi * rng.uniform();
        const double s = std::sqrt(1 - z * z);
        CHECK(gp_functional(c, {s * std::cos(phi), s * std::sin(phi), z}) <= best + 1e-12);
    }
    CHECK_THROWS(gp_functional(c, {1.0, 1.0, 0.0}));
    CHECK_THROWS(gp_functional(circle(0, 1.0), pole));
}

TEST_CASE("GP argmax ignores a positive rescaling of curvature")
{
    // An off-axis curve: the argmax comes from the direction of int kappa x ds,
    // so scaling every kappa by a constant leaves it fixed. Compare with the oracle.
    const auto r = oracle::fourier(0.7, {{1, 0.05, 0.02}, {2, 0.03, 0}});
    std::vector<double> rho(1024);
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = r.r(2 * oracle::pi * i / rho.size());
    const RadialCurve c(SpaceForm(1), rho);
    const auto y = gp_argmax(c);
    oracle::Vec3 v{0, 0, 0};
    for (int i = 0; i < 8192; ++i) {
        const auto s = oracle::sphere_point(r, 2 * oracle::pi * i / 8192);
        const double sp = oracle::norm(s.x1);
        const double kg = oracle::dot(s.x, oracle::cross(s.x1, s.x2)) / (sp * sp * sp);
        for (int d = 0; d < 3; ++d) v[d] += 3.5 * kg * s.x[d] * sp;
    }
    const double n = oracle::norm(v);
    for (int d = 0; d < 3; ++d) CHECK(y[d] == Approx(v[d] / n).epsilon(1e-8).scale(1.0));
}

TEST_CASE("counterexample gap")
{
    CHECK(std::abs(gp_counterexample_gap(circle(1, 0.8, 2048)).gap) <= 1e-8);
    const auto cert = gp_counterexample_gap(perturbed_circle(SpaceForm(1), 2048, 0.8, 0.05, 2));
    const auto pert = oracle::perturbed_circle(0.8, 0.05, 2);
    const double L = oracle::length(1, pert);
    CHECK(cert.bound == Approx(2 * oracle::pi - L * L / (2 * oracle::pi)).epsilon(1e-10));
    CHECK(cert.gap > 0.0);
    CHECK(cert.gap == Approx(cert.bound - oracle::gp_functional(pert, {0, 0, 1})).epsilon(1e-5));
}

TEST_CASE("report serialisation")
{
    const auto r = make_report(ellipse(256));
    CHECK(report_field_names().size() == report_values(r).size());
    const auto j = to_json(r);
    CHECK(j.size() == report_field_names().size());
    CHECK(j["L"].get<double>() == r.L);
    const auto row = report_csv_row(r);
    CHECK(std::count(row.begin(), row.end(), ',') == static_cast<long>(report_field_names().size()) - 1);
    CHECK(quadrature_tolerance(0.5) == 1e-8);
    CHECK(quadrature_tolerance(10.0) == Approx(1e-6));
}
