#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mvlab/cameron_martin.hpp"
#include "mvlab/drift.hpp"
#include "mvlab/ensemble.hpp"
#include "mvlab/estimators.hpp"
#include "mvlab/rng.hpp"
#include "mvlab/sde.hpp"

using namespace mvlab;

TEST_CASE("philox known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) ==
          A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                     A2{0xffffffffu, 0xffffffffu}) ==
          A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                     A2{0xa4093822u, 0x299f31d0u}) ==
          A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("random streams are reproducible and substream-separated") {
    RandomStream a(42, 7), b(42, 7), c(42, 8);
    bool all_equal = true;
    bool any_differ = false;
    for (int i = 0; i < 64; ++i) {
        const double ua = a.uniform();
        const double ub = b.uniform();
        const double uc = c.uniform();
        CHECK(ua > 0.0);
        CHECK(ua < 1.0);
        all_equal = all_equal && ua == ub;
        any_differ = any_differ || ua != uc;
    }
    CHECK(all_equal);
    CHECK(any_differ);

    // Normals have roughly unit scale (sanity only, not a statistics test).
    RandomStream d(1, 0);
    double acc = 0.0;
    for (int i = 0; i < 4096; ++i) {
        const double z = d.normal();
        acc += z * z;
    }
    CHECK(acc / 4096.0 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("step count accepts only grid-aligned horizons") {
    CHECK(step_count(1.0, 1e-3) == 1000);
    CHECK(step_count(0.64, 2.5e-3) == 256);
    CHECK_THROWS(step_count(0.05, 0.003));
}

TEST_CASE("zero drift reduces to the driving noise") {
    const PathSample path = simulate_path(get_drift("zero"), 0.0, 1.0, 1e-3, 9, 4);
    REQUIRE(path.states.size() == path.wiener.size());
    for (std::size_t k = 0; k < path.states.size(); ++k)
        CHECK(path.states[k] == path.wiener[k]);  // bitwise: same accumulation
    CHECK(flow_derivative(path, get_drift("zero")) == 1.0);
    CHECK(gradient_norm(path, get_drift("zero")) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flow transitions form a cocycle") {
    const DriftSpec spec = get_drift("sin");
    const PathSample path = simulate_path(spec, 0.3, 1.0, 1e-3, 11, 0);
    const std::vector<double> cum = bprime_cumulative(path, spec);
    const double whole = flow_transition(cum, 0, 1000);
    const double split = flow_transition(cum, 0, 400) * flow_transition(cum, 400, 1000);
    CHECK(whole == doctest::Approx(split).epsilon(1e-10));
    CHECK(whole == doctest::Approx(flow_derivative(path, spec)).epsilon(1e-12));
}

TEST_CASE("linear drift closed forms") {
    const DriftSpec lin = get_drift("linear_test");
    const PathSample path = simulate_path(lin, 0.3, 1.0, 1e-4, 5, 2);
    CHECK(flow_derivative(path, lin) == doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
    CHECK(gradient_norm(path, lin) ==
          doctest::Approx(std::sqrt((1.0 - std::exp(-2.0)) / 2.0)).epsilon(1e-4));
    const CameronMartinVector<double> ramp({0.0, 1.0}, {1.0});
    CHECK(malliavin_derivative_path(path, lin, ramp) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-3));
}

TEST_CASE("wiener shift oracle agrees with the trapezoid derivative") {
    const DriftSpec spec = get_drift("sin");
    const PathSample path = simulate_path(spec, 0.1, 1.0, 1e-3, 23, 5);
    const CameronMartinVector<double> h({0.0, 0.25, 0.6, 1.0}, {1.0, -0.7, 0.4});
    const double duhamel = malliavin_derivative_path(path, spec, h);
    const double shifted = wiener_shift_derivative(path, spec, h, 1e-3);
    CHECK(duhamel == doctest::Approx(shifted).epsilon(1e-2));
}

TEST_CASE("moment bound formula and monotonicity") {
    CHECK(moment_bound_value(2, 1, 1, 1, 1) == doctest::Approx(5.0 * std::exp(9.0)).epsilon(1e-12));
    CHECK(moment_bound_value(2, 1, 1, 0, 1) == 1.0);
    const double base = moment_bound_value(2, 1, 1, 1, 1);
    CHECK(moment_bound_value(3, 1, 1, 1, 1) > base);
    CHECK(moment_bound_value(2, 2, 2, 1, 1) > base);
    CHECK(moment_bound_value(2, 1, 2, 1, 1) > base);
    CHECK(moment_bound_value(2, 1, 1, 1.5, 1) > base);
    CHECK(moment_bound_value(2, 1, 1, 1, 2) > base);
}

TEST_CASE("half factorial series reaches its closed form") {
    CHECK(series_closed_form(1.0) == doctest::Approx(2.0 * M_E).epsilon(1e-15));
    CHECK(series_half_factorial(1.0, 200) == doctest::Approx(2.0 * M_E).epsilon(1e-12));
    CHECK(series_half_factorial(2.0, 200) ==
          doctest::Approx(3.0 * std::exp(4.0)).epsilon(1e-12));
}

TEST_CASE("ensemble reduction is worker-count invariant") {
    auto stat = [](std::size_t i, std::span<double> row) {
        RandomStream rs(99, i);
        row[0] = rs.normal();
        row[1] = row[0] * row[0];
    };
    const MomentSums one = ensemble_moments(1000, 2, 1, stat);
    const MomentSums three = ensemble_moments(1000, 2, 3, stat);
    CHECK(one.sum[0] == three.sum[0]);
    CHECK(one.sum[1] == three.sum[1]);
    CHECK(one.sumsq[0] == three.sumsq[0]);
    CHECK(one.sumsq[1] == three.sumsq[1]);
    CHECK(one.count == three.count);
}

TEST_CASE("quadrature and monte carlo drift integrals agree") {
    const DriftSpec spec = get_drift("sin");
    const auto mc = estimate_In_mc(spec, 2, 1.0, 1e-3, 20000, 3, 0);
    for (int n = 1; n <= 2; ++n) {
        const double quad = estimate_In_quadrature(spec, n, 1.0, 32, 32);
        CHECK(std::abs(mc[n - 1].value - quad) <= 3.0 * mc[n - 1].std_error + 1e-12);
    }
}

TEST_CASE("girsanov identities at modest path counts") {
    const GirsanovResult res = girsanov_check(get_drift("cos"), 0.3, 1.0, 2e-3, 20000, 17, 0);
    CHECK(std::abs(res.weight_mean.value - 1.0) <= 4.0 * res.weight_mean.std_error);
    CHECK(std::abs(res.weighted_x2.value - (0.09 + 1.0)) <= 4.0 * res.weighted_x2.std_error);
}

TEST_CASE("exponential moment inequality holds for sin") {
    const ExpMomentResult res =
        exp_moment_check(get_drift("sin"), 2.0, 0.0, 1.0, 1.0, 2e-3, 10000, 29, 0);
    CHECK(res.holds);
    CHECK(res.lhs.value < res.rhs);
}

TEST_CASE("sobolev estimate with zero drift matches the closed form") {
    // E int_{-R}^{R} (|x + W_t|^2 + 1) dx = 2R^3/3 + 2Rt + 2R; the derivative
    // part contributes exactly 2R because X' is identically 1.
    const Estimate est =
        sobolev_norm_estimate(get_drift("zero"), 1.0, 0.01, 1.0, 2.0, 41, 400, 31, 0);
    const double target = 2.0 / 3.0 + 2.0 + 2.0;
    CHECK(std::abs(est.value - target) <= 4.0 * est.std_error + 1e-3);
}

TEST_CASE("time continuity exponent is exact for zero drift") {
    const std::vector<double> gaps = {0.04, 0.16, 0.64};
    const TimeContinuityResult res =
        time_continuity_check(get_drift("zero"), 0.2, gaps, 4.0, 4.0, 1.0, 5, 2.5e-3, 800, 37, 0);
    CHECK(res.slope == doctest::Approx(2.0).epsilon(0.15));
}
