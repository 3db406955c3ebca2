#include "mvlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mvlab/algebra.hpp"
#include "mvlab/heat_kernel.hpp"
#include "mvlab/quadrature.hpp"
#include "mvlab/rng.hpp"
#include "mvlab/sde.hpp"
#include "mvlab/simplex.hpp"

namespace mvlab {

namespace {

double in_quadrature_level(const DriftSpec& spec, int depth, int n, double t, double s_prev,
                           double w_prev, const QuadRule& unit_gl, const QuadRule& gh) {
    double acc = 0.0;
    const double span = t - s_prev;
    for (std::size_t i = 0; i < unit_gl.nodes.size(); ++i) {
        const double s = s_prev + span * unit_gl.nodes[i];
        const double gap = s - s_prev;
        double inner = 0.0;
        for (std::size_t a = 0; a < gh.nodes.size(); ++a) {
            const double w = w_prev + std::sqrt(gap) * gh.nodes[a];
            double value = eval_bprime(spec, w);
            if (depth < n) {
                value *= in_quadrature_level(spec, depth + 1, n, t, s, w, unit_gl, gh);
            }
            inner += gh.weights[a] * value;
        }
        acc += span * unit_gl.weights[i] * inner;
    }
    return acc;
}

}  // namespace

double estimate_In_quadrature(const DriftSpec& spec, int n, double t, int time_nodes,
                              int gh_nodes) {
    if (n < 1 || !(t > 0.0)) {
        throw std::invalid_argument("estimate_In_quadrature: need n >= 1 and t > 0");
    }
    const QuadRule unit_gl = gauss_legendre_on(time_nodes, 0.0, 1.0);
    const QuadRule gh = gauss_hermite_unit(gh_nodes);
    return in_quadrature_level(spec, 1, n, t, 0.0, 0.0, unit_gl, gh);
}

std::vector<Estimate> estimate_In_mc(const DriftSpec& spec, int n_max, double t, double dt,
                                     std::size_t paths, std::uint64_t seed, int workers) {
    if (n_max < 1) {
        throw std::invalid_argument("estimate_In_mc: need n_max >= 1");
    }
    const DriftSpec driftless = get_drift("zero");
    const auto sums = ensemble_moments(
        paths, static_cast<std::size_t>(n_max), workers,
        [&](std::uint64_t sub, std::span<double> out) {
            const PathSample path = simulate_path(driftless, 0.0, t, dt, seed, sub);
            const double a = bprime_cumulative(path, spec).back();
            double power = 1.0;
            double factorial = 1.0;
            for (int n = 1; n <= n_max; ++n) {
                power *= a;
                factorial *= static_cast<double>(n);
                out[static_cast<std::size_t>(n - 1)] = power / factorial;
            }
        });
    std::vector<Estimate> result;
    result.reserve(static_cast<std::size_t>(n_max));
    for (int n = 0; n < n_max; ++n) {
        result.push_back(to_estimate(sums, static_cast<std::size_t>(n)));
    }
    return result;
}

namespace {

// Tensor Gauss-Hermite expectation of f(W_{s_1}, ..., W_{s_n}) on a grid.
template <typename F>
double gh_tensor_expectation(const TimeGrid<double>& grid, int gh_nodes, F&& f) {
    const QuadRule gh = gauss_hermite_unit(gh_nodes);
    const std::size_t n = grid.size();
    std::vector<double> w(n, 0.0);
    double total = 0.0;
    std::vector<std::size_t> index(n, 0);
    // Odometer over the tensor grid; increments are independent normals.
    while (true) {
        double weight = 1.0;
        double level = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double gap = grid.gap(i);
            level += std::sqrt(gap) * gh.nodes[index[i]];
            w[i] = level;
            weight *= gh.weights[index[i]];
        }
        total += weight * f(std::span<const double>(w));
        std::size_t pos = 0;
        while (pos < n) {
            if (++index[pos] < gh.nodes.size()) break;
            index[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
    }
    return total;
}

}  // namespace

double ibp_expectation_lhs(const TimeGrid<double>& grid, const DriftSpec& spec, int gh_nodes) {
    return gh_tensor_expectation(grid, gh_nodes, [&](std::span<const double> w) {
        double prod = 1.0;
        for (double wi : w) prod *= eval_bprime(spec, wi);
        return prod;
    });
}

double ibp_expectation_rhs(const TimeGrid<double>& grid, const DriftSpec& spec, int gh_nodes) {
    const GaussianPolynomial<double> lambda = iterated_divergence<double>(grid);
    return gh_tensor_expectation(grid, gh_nodes, [&](std::span<const double> w) {
        double prod = 1.0;
        for (double wi : w) prod *= spec.b(wi);
        return prod * lambda.evaluate(w);
    });
}

Estimate estimate_term(std::span<const int> orders, const DriftSpec& spec, double t,
                       std::size_t samples, std::uint64_t seed, int workers) {
    const std::size_t n = orders.size();
    if (n == 0 || !(t > 0.0)) {
        throw std::invalid_argument("estimate_term: need at least one factor and t > 0");
    }
    for (int k : orders) {
        if (k < 0 || k > kMaxKernelDerivative) {
            throw std::invalid_argument("estimate_term: derivative order out of range");
        }
    }
    double scale = 1.0;  // t^n / n!: Jacobian of ordered uniforms on the simplex
    for (std::size_t i = 1; i <= n; ++i) {
        scale *= t / static_cast<double>(i);
    }
    const std::vector<int> ks(orders.begin(), orders.end());
    const auto sums = ensemble_moments(
        samples, 1, workers, [&](std::uint64_t sub, std::span<double> out) {
            RandomStream stream(seed, sub);
            std::vector<double> times(n);
            for (std::size_t i = 0; i < n; ++i) times[i] = t * stream.uniform();
            std::sort(times.begin(), times.end());
            double value = scale;
            double prev_s = 0.0;
            double y = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double gap = times[i] - prev_s;
                const double dy = std::sqrt(gap) * stream.normal();
                y += dy;
                value *= spec.b(y) * kernel_ratio(ks[i], gap, dy);
                prev_s = times[i];
            }
            out[0] = value;
        });
    return to_estimate(sums, 0);
}

DavieProbe probe_davie(const DriftSpec& spec, int n_max, double t, double dt,
                       std::size_t paths, std::uint64_t seed, int workers) {
    if (!(spec.bound > 0.0) || !std::isfinite(spec.bound)) {
        throw std::invalid_argument("probe_davie: drift needs a finite nonzero bound");
    }
    DavieProbe probe;
    probe.moments = estimate_In_mc(spec, n_max, t, dt, paths, seed, workers);
    probe.normalized.reserve(static_cast<std::size_t>(n_max));
    const double base = spec.bound * std::sqrt(t);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double in = probe.moments[static_cast<std::size_t>(n - 1)].value;
        const double m =
            std::pow(std::abs(in) * half_factorial(n), 1.0 / static_cast<double>(n)) / base;
        probe.normalized.push_back(m);
        const double x = static_cast<double>(n);
        sx += x;
        sy += m;
        sxx += x * x;
        sxy += x * m;
    }
    const double count = static_cast<double>(n_max);
    probe.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return probe;
}

namespace {

// E |a Z + c| for Z standard normal.
double folded_normal_mean(double a, double c) {
    const double s = std::abs(a);
    if (s < 1e-300) return std::abs(c);
    return s * std::sqrt(2.0 / M_PI) * std::exp(-c * c / (2.0 * s * s)) +
           c * std::erf(c / (s * std::sqrt(2.0)));
}

}  // namespace

double lambda_abs_mean(double s1, double s2) {
    if (!(0.0 < s1) || !(s1 < s2)) {
        throw std::invalid_argument("lambda_abs_mean: need 0 < s1 < s2");
    }
    const TimeGrid<double> grid({s1, s2}, s2);
    const GaussianPolynomial<double> inc = iterated_divergence<double>(grid).to_increments();
    // Split by degree in the first increment: Lambda_2 = A(V2) V1 + C(V2) with
    // V1 ~ N(0, s1) independent of V2 ~ N(0, s2 - s1). The change of basis
    // cancels the V1^2 coefficient only up to roundoff scaled by 1/gap^2, so
    // prune relative to the largest surviving coefficient before splitting.
    double scale = 0.0;
    for (const auto& [mono, coeff] : inc.terms()) scale = std::max(scale, std::abs(coeff));
    GaussianPolynomial<double> a_poly(2);
    GaussianPolynomial<double> c_poly(2);
    for (const auto& [mono, coeff] : inc.terms()) {
        if (std::abs(coeff) <= 1e-9 * scale) continue;
        Monomial rest = mono;
        rest[0] = 0;
        if (mono[0] == 0) {
            c_poly.add_term(rest, coeff);
        } else if (mono[0] == 1) {
            a_poly.add_term(rest, coeff);
        } else {
            throw std::logic_error("lambda_abs_mean: unexpected degree in the first increment");
        }
    }
    const double gap = s2 - s1;
    const double sd2 = std::sqrt(gap);
    const double sd1 = std::sqrt(s1);
    const auto integrand = [&](double v2) {
        const double point[2] = {0.0, v2};
        const double a = a_poly.evaluate(std::span<const double>(point, 2)) * sd1;
        const double c = c_poly.evaluate(std::span<const double>(point, 2));
        const double density = std::exp(-v2 * v2 / (2.0 * gap)) / (sd2 * std::sqrt(2.0 * M_PI));
        return density * folded_normal_mean(a, c);
    };
    const double limit = 10.0 * sd2;
    const double tol = 1e-10 * (1.0 + 1.0 / gap);
    return adaptive_simpson(integrand, -limit, limit, tol, 30);
}

double abs_moment_g2m1() {
    const auto density = [](double x) {
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    };
    const double inner = adaptive_simpson(
        [&](double x) { return (1.0 - x * x) * density(x); }, 0.0, 1.0, 1e-13, 30);
    const double outer = adaptive_simpson(
        [&](double x) { return (x * x - 1.0) * density(x); }, 1.0, 10.0, 1e-13, 30);
    return 2.0 * (inner + outer);
}

}  // namespace mvlab
