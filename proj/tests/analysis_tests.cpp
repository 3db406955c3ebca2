#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mvlab/drift.hpp"
#include "mvlab/grid.hpp"
#include "mvlab/heat_kernel.hpp"
#include "mvlab/simplex.hpp"

using namespace mvlab;

namespace {

// Fourth-order central difference, one derivative at a time.
double fd_derivative(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / (2 * panels);
    double acc = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Principal Lambert branch by Newton iteration on w e^w = y, y > 0.
double lambert_w(double y) {
    double w = std::log1p(y);
    for (int i = 0; i < 60; ++i) {
        const double ew = std::exp(w);
        w -= (w * ew - y) / (ew * (1.0 + w));
    }
    return w;
}

}  // namespace

TEST_CASE("kernel derivatives match finite differences") {
    const double t = 0.7;
    const double x = 0.4;
    std::function<double(double)> f0 = [&](double z) { return heat_kernel(t, z); };
    CHECK(kernel_derivative(t, x, 1) ==
          doctest::Approx(fd_derivative(f0, x, 1e-3)).epsilon(1e-8));
    std::function<double(double)> f1 = [&](double z) { return kernel_derivative(t, z, 1); };
    CHECK(kernel_derivative(t, x, 2) ==
          doctest::Approx(fd_derivative(f1, x, 1e-3)).epsilon(1e-8));
    std::function<double(double)> f3 = [&](double z) { return kernel_derivative(t, z, 3); };
    CHECK(kernel_derivative(t, x, 4) ==
          doctest::Approx(fd_derivative(f3, x, 1e-3)).epsilon(1e-7));
}

TEST_CASE("kernel ratio stays consistent and survives the far tail") {
    for (int k = 0; k <= 5; ++k) {
        const double direct = kernel_derivative(0.6, 0.9, k) / heat_kernel(0.6, 0.9);
        CHECK(kernel_ratio(k, 0.6, 0.9) == doctest::Approx(direct).epsilon(1e-12));
    }
    // x = 50 at t = 0.3 underflows the density; the ratio form must not.
    const double z = 50.0 / std::sqrt(0.3);
    const double expect = -std::pow(0.3, -1.5) * hermite_he(3, z);
    CHECK(heat_kernel(0.3, 50.0) == 0.0);
    CHECK(kernel_ratio(3, 0.3, 50.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("hermite polynomials satisfy the recurrence") {
    for (double z : {-2.3, -0.5, 0.0, 1.7, 4.1}) {
        CHECK(hermite_he(0, z) == 1.0);
        CHECK(hermite_he(1, z) == z);
        for (int k = 1; k <= 8; ++k)
            CHECK(hermite_he(k + 1, z) ==
                  doctest::Approx(z * hermite_he(k, z) - k * hermite_he(k - 1, z))
                      .epsilon(1e-12));
    }
}

TEST_CASE("heat kernel obeys the semigroup identity") {
    // int q_a(u) q_b(y - u) du = q_{a+b}(y) by wide Simpson quadrature.
    const double a = 0.4, b = 0.9, y = 0.6;
    std::function<double(double)> f = [&](double u) {
        return heat_kernel(a, u) * heat_kernel(b, y - u);
    };
    CHECK(simpson(f, -12.0, 12.0, 4000) ==
          doctest::Approx(heat_kernel(a + b, y)).epsilon(1e-10));
}

TEST_CASE("mixed partial expansion has the documented structure") {
    const auto terms1 = mixed_partial_terms(1);
    REQUIRE(terms1.size() == 1);
    CHECK(terms1[0] == KernelTerm{{1}, 1});

    const auto terms2 = mixed_partial_terms(2);
    REQUIRE(terms2.size() == 2);
    const KernelTerm keep{{1, 1}, 1};
    const KernelTerm push{{0, 2}, -1};
    CHECK(std::count(terms2.begin(), terms2.end(), keep) == 1);
    CHECK(std::count(terms2.begin(), terms2.end(), push) == 1);

    const auto terms3 = mixed_partial_terms(3);
    CHECK(terms3.size() == 4);
    for (const auto& term : terms3) {
        int total = 0;
        for (int o : term.orders) total += o;
        CHECK(total == 3);  // each summand carries all three derivatives
    }
}

TEST_CASE("mixed partial value matches a finite difference of the product") {
    const std::vector<double> times = {0.3, 0.8};
    const double h = 1e-3;
    auto q = [&](double y1, double y2) {
        const std::vector<double> y = {y1, y2};
        return product_density(times, y);
    };
    const double y1 = 0.2, y2 = -0.4;
    const double fd = (q(y1 + h, y2 + h) - q(y1 + h, y2 - h) - q(y1 - h, y2 + h) +
                       q(y1 - h, y2 - h)) /
                      (4 * h * h);
    const std::vector<double> y = {y1, y2};
    CHECK(mixed_partial_value(times, y) == doctest::Approx(fd).epsilon(1e-5));
    CHECK(mixed_partial_over_density(times, y) ==
          doctest::Approx(mixed_partial_value(times, y) / product_density(times, y))
              .epsilon(1e-10));
}

TEST_CASE("representation residual vanishes on a fixed grid") {
    const TimeGrid<double> grid({0.2, 0.45, 0.85});
    const std::vector<double> y = {0.3, -0.6, 1.1};
    CHECK(std::abs(representation_residual(grid, y)) < 1e-10);
}

TEST_CASE("wallis values and ball volumes") {
    CHECK(wallis(0) == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(wallis(1) == 1.0);
    CHECK(wallis(2) == doctest::Approx(M_PI / 4).epsilon(1e-15));
    CHECK(wallis(3) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    // One direct quadrature cross-check of the recurrence.
    std::function<double(double)> s5 = [](double th) { return std::pow(std::sin(th), 5); };
    CHECK(wallis(5) == doctest::Approx(simpson(s5, 0.0, M_PI / 2, 2000)).epsilon(1e-10));

    CHECK(ball_volume(0) == 1.0);
    CHECK(ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ball_volume(2) == doctest::Approx(M_PI).epsilon(1e-14));
    CHECK(ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-14));
    for (int q = 1; q <= 6; ++q) {
        double fact = 1.0;
        for (int k = 2; k <= q; ++k) fact *= k;
        CHECK(ball_volume(2 * q) == doctest::Approx(std::pow(M_PI, q) / fact).epsilon(1e-12));
    }
}

TEST_CASE("a alpha equals the Lambert-form target and direct quadrature") {
    for (double alpha : {0.0, 0.5, 1.0, 1.5, 2.0})
        CHECK(a_alpha(alpha) == doctest::Approx(2.0 * wallis(static_cast<int>(2 * alpha + 1)))
                                    .epsilon(1e-12));
    // And against the Beta value B(alpha+1, 1/2) for a non-half-integer.
    const double alpha = 0.75;
    const double beta = std::tgamma(alpha + 1) * std::tgamma(0.5) / std::tgamma(alpha + 1.5);
    CHECK(a_alpha(alpha) == doctest::Approx(beta).epsilon(1e-10));
    // The Newton-solved Lambert branch is a self-check of the test oracle.
    CHECK(lambert_w(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-12));
}

TEST_CASE("eta quadrature approaches the closed form") {
    const auto eta = eta_quadrature(6, 1.0, 2000);
    for (int n = 1; n <= 6; ++n)
        CHECK(eta[n - 1] == doctest::Approx(eta_closed(n, 1.0)).epsilon(2e-4));
    CHECK(eta_closed(2, 2.0) == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
}

TEST_CASE("ordered simplex integrals via beta chains") {
    // All exponents zero: plain simplex volume t^n / n!.
    const std::vector<double> zeros3 = {0.0, 0.0, 0.0};
    CHECK(ordered_simplex_integral(2.0, zeros3, 0.0) ==
          doctest::Approx(8.0 / 6.0).epsilon(1e-12));
    // Two inverse square roots reproduce eta_2.
    const std::vector<double> halves = {-0.5, -0.5};
    CHECK(ordered_simplex_integral(1.0, halves, 0.0) == doctest::Approx(M_PI).epsilon(1e-12));
    // A tail exponent folds in as one more Beta factor: for one gap,
    // int_0^t s^{-1/2} (t - s)^{-1/2} ds = pi independent of t.
    const std::vector<double> one_half = {-0.5};
    CHECK(ordered_simplex_integral(0.5, one_half, -0.5) ==
          doctest::Approx(M_PI).epsilon(1e-12));
    // Scaling: every unit of total exponent weight shifts the t-power by one.
    const std::vector<double> mixed = {0.5, -0.5};
    const double ratio = ordered_simplex_integral(2.0, mixed, 1.0) /
                         ordered_simplex_integral(1.0, mixed, 1.0);
    CHECK(ratio == doctest::Approx(std::pow(2.0, 2.0 + 0.5 - 0.5 + 1.0)).epsilon(1e-12));
}

TEST_CASE("series coefficient bound formula") {
    CHECK(half_factorial(0) == 1.0);
    CHECK(half_factorial(5) == 2.0);
    CHECK(half_factorial(8) == 24.0);
    const double c = 2.0 * std::sqrt(M_PI) / std::sqrt(M_E);
    CHECK(bound_In1(2, 1.0, 1.0) == doctest::Approx(c * c).epsilon(1e-12));
    CHECK(bound_In1(3, 2.0, 0.5) ==
          doctest::Approx(std::pow(c * 0.5, 3) * std::pow(2.0, 1.5)).epsilon(1e-12));
    CHECK(davie_bound(4, 1.0, 1.0, 2.0) > davie_bound(4, 1.0, 1.0, 1.0));
}

TEST_CASE("drift registry resolves names with metadata") {
    for (const char* name : {"zero", "const", "sin", "cos", "scaled_tanh", "sign", "linear_test"})
        CHECK_NOTHROW(get_drift(name));

    const DriftSpec s = get_drift("sin");
    CHECK(s.bound == 1.0);
    CHECK(s.has_derivative);
    CHECK(eval_b(s, 0.0) == 0.0);
    CHECK(eval_bprime(s, 0.0) == 1.0);

    const std::vector<double> two = {2.0};
    const DriftSpec c2 = get_drift("const", two);
    CHECK(c2.bound == 2.0);
    CHECK(eval_b(c2, 5.0) == 2.0);
    CHECK(eval_bprime(c2, 5.0) == 0.0);

    const DriftSpec sg = get_drift("sign");
    CHECK(!sg.has_derivative);
    CHECK(sg.bound == 1.0);
    CHECK(eval_b(sg, 3.0) == 1.0);
    CHECK(eval_b(sg, -3.0) == -1.0);

    const DriftSpec lin = get_drift("linear_test");
    CHECK(!lin.within_hypotheses);
    CHECK(eval_bprime(lin, 0.7) == -1.0);

    for (const char* name : {"sin", "cos", "scaled_tanh"}) {
        const DriftSpec sp = get_drift(name);
        for (double x : {-1.3, 0.2, 2.4}) {
            std::function<double(double)> f = [&](double z) { return eval_b(sp, z); };
            CHECK(eval_bprime(sp, x) == doctest::Approx(fd_derivative(f, x, 1e-3)).epsilon(1e-8));
        }
    }
}

TEST_CASE("mollified sign matches the exact convolution") {
    // Independent oracle: the bump is pinned as C exp(-1/(1-u^2)) on (-1,1),
    // so sign * phi_n has the closed reduction 2 F(n x) - 1 with F the bump
    // CDF, and its derivative is 2 phi_n. The fixed-rule convolution of a
    // discontinuous base is a fine staircase in x, so values are compared at
    // the rule's accuracy for jumps, not by pointwise finite differences.
    auto phi_raw = [](double u) {
        return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    };
    const double C = 1.0 / simpson(phi_raw, -1.0, 1.0, 4000);
    auto cdf = [&](double v) {
        if (v <= -1.0) return 0.0;
        if (v >= 1.0) return 1.0;
        return C * simpson(phi_raw, -1.0, v, 4000);
    };

    const int level = 8;
    const DriftSpec m = mollify(get_drift("sign"), level);
    CHECK(m.has_derivative);
    CHECK(m.bound == 1.0);
    CHECK(std::abs(eval_b(m, 0.0)) < 1e-12);        // odd base, even bump
    CHECK(std::abs(eval_bprime(m, 1.0)) < 1e-12);   // outside the jump zone
    CHECK(eval_b(m, 0.2) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(eval_b(m, -0.2) == doctest::Approx(-1.0).epsilon(1e-10));

    double prev = -2.0;
    for (int k = -30; k <= 30; ++k) {
        const double x = 0.01 * k;
        const double bx = eval_b(m, x);
        CHECK(std::abs(bx) <= 1.0 + 1e-10);
        CHECK(bx >= prev - 1e-14);  // the convolution of sign is monotone
        prev = bx;
        CHECK(bx == doctest::Approx(2.0 * cdf(level * x) - 1.0).scale(1.0).epsilon(2.5e-2));
        const double target = 2.0 * level * C * phi_raw(level * x);
        CHECK(eval_bprime(m, x) == doctest::Approx(target).scale(10.0).epsilon(5e-2));
        CHECK(eval_bprime(m, x) >= -1e-12);
    }
}

TEST_CASE("mollified smooth drifts converge and stay differentiable") {
    // For a smooth base the fixed rule really is spectrally accurate, so the
    // returned derivative must agree with finite differences of the values.
    const DriftSpec m4 = mollify(get_drift("sin"), 4);
    for (double x : {-1.1, 0.3, 2.0}) {
        std::function<double(double)> f = [&](double z) { return eval_b(m4, z); };
        CHECK(eval_bprime(m4, x) == doctest::Approx(fd_derivative(f, x, 1e-3)).epsilon(1e-8));
    }
    double worst_prev = 1e9;
    for (int level : {2, 8, 32}) {
        const DriftSpec m = mollify(get_drift("sin"), level);
        double worst = 0.0;
        for (int k = -20; k <= 20; ++k) {
            const double x = 0.15 * k;
            worst = std::max(worst, std::abs(eval_b(m, x) - std::sin(x)));
        }
        CHECK(worst < worst_prev + 1e-6);
        worst_prev = worst;
        CHECK(std::abs(eval_b(m, 5.0)) <= 1.0 + 1e-10);
    }
}
