#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../oracles.hpp"
#include "icflow/generate.hpp"
#include "icflow/io.hpp"
#include "icflow/rng.hpp"
#include "icflow/svg.hpp"

using namespace icflow;
using doctest::Approx;

TEST_CASE("SplitMix64 reference stream")
{
    // first outputs for seed 0 from the published reference implementation
    SplitMix64 r(0);
    CHECK(r.next() == 0xE220A8397B1DCDAFULL);
    CHECK(r.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(r.next() == 0x06C45D188009454FULL);
    oracle::Mix o{12345};
    SplitMix64 s(12345);
    for (int i = 0; i < 100; ++i) CHECK(s.uniform() == o.uniform());
}

TEST_CASE("generators")
{
    CurveSpec spec;
    const SpaceForm plane(0);
    auto c = generate(spec, plane, 32);
    for (double r : c.rho()) CHECK(r == 1.0);

    spec.kind = CurveKind::Ellipse;
    c = generate(spec, plane, 64);
    CHECK(c.rho(0) == Approx(2.0));
    CHECK(c.rho(16) == Approx(1.0));
    CHECK_THROWS(generate(spec, SpaceForm(1), 64));

    spec.kind = CurveKind::Fourier;
    spec.r0 = 0.5;
    spec.modes = {{2, 0.1, 0.0}, {3, 0.0, 0.05}};
    c = generate(spec, plane, 64);
    const auto o = oracle::fourier(0.5, {{2, 0.1, 0.0}, {3, 0.0, 0.05}});
    for (std::size_t i = 0; i < 64; ++i) CHECK(c.rho(i) == Approx(o.r(c.theta(i))).epsilon(1e-15));

    spec.kind = CurveKind::Kink;
    spec.r0 = 1.0;
    c = generate(spec, plane, 64);
    CHECK(c.rho(0) == Approx(1.2));
    CHECK(c.rho(16) == Approx(1.0));

    spec.kind = CurveKind::Circle;
    spec.r0 = 1.6;
    CHECK_THROWS_AS(generate(spec, SpaceForm(1), 32), std::domain_error);
}

TEST_CASE("random curves are reproducible and of the requested shape")
{
    CurveSpec spec;
    spec.kind = CurveKind::Random;
    spec.seed = 42;
    for (int K : {-1, 0, 1}) {
        const auto a = generate(spec, SpaceForm(K), 128), b = generate(spec, SpaceForm(K), 128);
        CHECK(a == b);
        CHECK(is_strictly_convex(a).strictly_convex);
    }
    SplitMix64 rng(3);
    for (int k = 0; k < 20; ++k)
        CHECK_FALSE(is_strictly_convex(generate_random(rng, RandomShape::NonConvex, 1.0, SpaceForm(-1), 256)).strictly_convex);
}

TEST_CASE("config files")
{
    std::istringstream in("# comment\nK = -1\nN=128  # trailing\n\nmodes = 2:0.1:0, 3:0:0.02\nK = 1\nname = a b\n");
    auto cfg = ExperimentConfig::parse(in);
    CHECK(cfg.get_int("K", 0) == 1);
    CHECK(cfg.get_int("N", 0) == 128);
    CHECK(cfg.get_string("name", "") == "a b");
    CHECK(cfg.get_double("sigma", 0.25) == 0.25);
    const auto modes = parse_modes(cfg.get_string("modes", ""));
    REQUIRE(modes.size() == 2);
    CHECK(modes[1].m == 3);
    CHECK(modes[1].b == 0.02);
    CHECK(cfg.unused_keys().empty());
    cfg.set("K", "0");
    CHECK(cfg.get_int("K", 5) == 0);

    cfg.set("typo", "1");
    CHECK_THROWS_AS(cfg.reject_unused(), ConfigError);
    cfg.set("x", "1.5e");
    CHECK_THROWS_AS(cfg.get_double("x", 0), ConfigError);
    cfg.set("flag", "maybe");
    CHECK_THROWS_AS(cfg.get_bool("flag", false), ConfigError);
    std::istringstream bad("just words\n");
    CHECK_THROWS_AS(ExperimentConfig::parse(bad), ConfigError);
    CHECK_THROWS_AS(parse_modes("2"), ConfigError);
    CHECK_THROWS_AS(parse_modes("0:0.1"), ConfigError);
}

TEST_CASE("flow config from settings")
{
    ExperimentConfig cfg;
    cfg.set("sigma", "0.2");
    cfg.set("refine_on_failure", "yes");
    const auto fc = flow_config_from(cfg);
    CHECK(fc.sigma == 0.2);
    CHECK(fc.refine_on_failure);
    cfg.set("sigma", "0.9");
    CHECK_THROWS_AS(flow_config_from(cfg), ConfigError);
}

TEST_CASE("trace export")
{
    const auto c0 = perturbed_circle(SpaceForm(0), 32, 1.0, 0.02, 2);
    FlowConfig cfg;
    cfg.report_stride = 10;
    cfg.log_snapshots = true;
    const auto t = run(c0, SpeedLaw::ConstrainedICF, cfg);
    std::ostringstream os;
    write_trace_csv(os, t);
    const auto text = os.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(t.times.size()) + 1);
    CHECK(text.rfind("t,L,A,", 0) == 0);
    const auto s = trace_summary(t);
    CHECK(s["status"] == "Converged");
    CHECK(s["steps"] == t.steps);
    CHECK(s["violations"].is_array());
    CHECK(t.snapshots.size() > 3);
    CHECK(snapshot_file_name(t.snapshots[1]).rfind("curve_000000010_t", 0) == 0);
}

TEST_CASE("projections")
{
    auto p = project(SpaceForm(-1), 1.0, 0.0);
    CHECK(p[0] == Approx(std::tanh(0.5)));
    p = project(SpaceForm(1), 0.5, oracle::pi / 2);
    CHECK(p[1] == Approx(std::sin(0.5)));
    p = project(SpaceForm(0), 2.0, oracle::pi);
    CHECK(p[0] == Approx(-2.0));
    const RadialCurve c(SpaceForm(-1), std::vector<double>(16, 1.0));
    const auto svg = overlay_svg({{&c, "a<b"}}, "t");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("a&lt;b") != std::string::npos);
}
