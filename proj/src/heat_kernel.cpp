#include "mvlab/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mvlab/algebra.hpp"

namespace mvlab {
namespace {

void check_time(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("heat kernel: time must be positive");
}

void check_order(int k) {
    if (k < 0 || k > kMaxKernelDerivative)
        throw std::invalid_argument("heat kernel: derivative order capped at 10");
}

void check_factors(std::span<const double> times, std::span<const double> y) {
    if (times.empty() || times.size() > static_cast<std::size_t>(kMaxKernelFactors))
        throw std::invalid_argument("product density: factor count must be in [1, 8]");
    if (times.size() != y.size())
        throw std::invalid_argument("product density: times and y must have equal length");
    double prev = 0.0;
    for (double s : times) {
        if (!(s > prev)) throw std::invalid_argument("product density: times must increase from 0");
        prev = s;
    }
}

}  // namespace

double heat_kernel(double t, double x) {
    check_time(t);
    return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

double log_heat_kernel(double t, double x) {
    check_time(t);
    return -x * x / (2.0 * t) - 0.5 * std::log(2.0 * std::numbers::pi * t);
}

double hermite_he(int k, double z) {
    if (k < 0) throw std::invalid_argument("hermite_he: negative order");
    double prev = 1.0;
    if (k == 0) return prev;
    double cur = z;
    for (int j = 1; j < k; ++j) {
        const double next = z * cur - j * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double kernel_ratio(int k, double t, double x) {
    check_time(t);
    check_order(k);
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    return sign * std::pow(t, -0.5 * k) * hermite_he(k, x / std::sqrt(t));
}

double kernel_derivative(double t, double x, int k) {
    return kernel_ratio(k, t, x) * heat_kernel(t, x);
}

std::vector<KernelTerm> mixed_partial_terms(int n) {
    if (n < 1 || n > kMaxKernelFactors)
        throw std::invalid_argument("mixed_partial_terms: n must be in [1, 8]");
    std::vector<KernelTerm> terms{KernelTerm{std::vector<int>(n, 0), +1}};
    for (int i = 0; i < n; ++i) {
        std::vector<KernelTerm> next;
        next.reserve(terms.size() * 2);
        for (const KernelTerm& t : terms) {
            KernelTerm self = t;
            ++self.orders[i];
            next.push_back(std::move(self));
            if (i + 1 < n) {
                KernelTerm fwd = t;
                ++fwd.orders[i + 1];
                fwd.sign = -fwd.sign;
                next.push_back(std::move(fwd));
            }
        }
        terms = std::move(next);
    }
    std::sort(terms.begin(), terms.end(), [](const KernelTerm& a, const KernelTerm& b) {
        return a.orders < b.orders;
    });
    return terms;
}

double product_density(std::span<const double> times, std::span<const double> y) {
    check_factors(times, y);
    double q = 1.0;
    double ps = 0.0, py = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        q *= heat_kernel(times[i] - ps, y[i] - py);
        ps = times[i];
        py = y[i];
    }
    return q;
}

double log_product_density(std::span<const double> times, std::span<const double> y) {
    check_factors(times, y);
    double lq = 0.0;
    double ps = 0.0, py = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        lq += log_heat_kernel(times[i] - ps, y[i] - py);
        ps = times[i];
        py = y[i];
    }
    return lq;
}

namespace {

template <class PerFactor>
double sum_over_terms(std::span<const double> times, std::span<const double> y, PerFactor factor) {
    const int n = static_cast<int>(times.size());
    double total = 0.0;
    for (const KernelTerm& term : mixed_partial_terms(n)) {
        double prod = static_cast<double>(term.sign);
        double ps = 0.0, py = 0.0;
        for (int i = 0; i < n; ++i) {
            prod *= factor(term.orders[i], times[i] - ps, y[i] - py);
            ps = times[i];
            py = y[i];
        }
        total += prod;
    }
    return total;
}

}  // namespace

double mixed_partial_value(std::span<const double> times, std::span<const double> y) {
    check_factors(times, y);
    return sum_over_terms(times, y, [](int k, double dt, double dy) {
        return kernel_derivative(dt, dy, k);
    });
}

double mixed_partial_over_density(std::span<const double> times, std::span<const double> y) {
    check_factors(times, y);
    return sum_over_terms(times, y, [](int k, double dt, double dy) {
        return kernel_ratio(k, dt, dy);
    });
}

double representation_residual(const TimeGrid<double>& grid, std::span<const double> y) {
    const std::size_t n = grid.size();
    if (y.size() != n) throw std::invalid_argument("representation_residual: arity mismatch");
    const std::span<const double> times(grid.times());
    const double q = product_density(times, y);
    // Direct division exercises the plain mixed partial when the density is
    // representable; otherwise fall back to the ratio form.
    const double lhs = q >= kDensityFloor ? mixed_partial_value(times, y) / q
                                          : mixed_partial_over_density(times, y);
    const GaussianPolynomial<double> lambda = iterated_divergence(grid);
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    const double rhs = sign * lambda.evaluate(y);
    return lhs - rhs;
}

}  // namespace mvlab
