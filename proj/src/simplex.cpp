#include "mvlab/simplex.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mvlab/quadrature.hpp"

namespace mvlab {

double wallis(int k) {
    if (k < 0) throw std::invalid_argument("wallis: negative order");
    double even = std::numbers::pi / 2.0, odd = 1.0;
    if (k == 0) return even;
    if (k == 1) return odd;
    double v = 0.0;
    for (int j = 2; j <= k; ++j) {
        double& slot = j % 2 == 0 ? even : odd;
        slot *= (j - 1.0) / j;
        v = slot;
    }
    return v;
}

double ball_volume(int n) {
    if (n < 0) throw std::invalid_argument("ball_volume: negative dimension");
    double v = 1.0;
    for (int k = 1; k <= n; ++k) v *= 2.0 * wallis(k);
    return v;
}

double a_alpha(double alpha) {
    if (!(alpha > -1.0)) throw std::invalid_argument("a_alpha: alpha must exceed -1");
    // tau = sin^2 theta turns (1-tau)^alpha tau^{-1/2} dtau into
    // 2 cos^{2 alpha + 1} theta dtheta; smooth on [0, pi/2].
    const QuadRule rule = gauss_legendre_on(96, 0.0, std::numbers::pi / 2.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * std::pow(std::cos(rule.nodes[i]), 2.0 * alpha + 1.0);
    return 2.0 * acc;
}

double eta_closed(int n, double t) {
    if (n < 1) throw std::invalid_argument("eta_closed: order must be >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("eta_closed: t must be positive");
    return ball_volume(n) * std::pow(t, 0.5 * n);
}

std::vector<double> eta_quadrature(int n_max, double t, int u_points) {
    if (n_max < 1 || n_max > kMaxEtaOrder)
        throw std::invalid_argument("eta_quadrature: order must be in [1, 12]");
    if (!(t > 0.0)) throw std::invalid_argument("eta_quadrature: t must be positive");
    if (u_points < 16) throw std::invalid_argument("eta_quadrature: grid too coarse");

    // Work with G_k(w) = eta_k(w^2): the convolution step
    //   rho_k(tau) = int_0^tau rho_{k-1}(tau - r) r^{-1/2} dr,  r = u^2,
    // becomes G_k(w) = 2 int_0^w G_{k-1}(sqrt(w^2 - u^2)) du, with the smooth
    // base case G_1(w) = 2w (the innermost antiderivative of r^{-1/2}).
    const int m = u_points;
    const double h = std::sqrt(t) / m;
    std::vector<double> prev(m + 1), cur(m + 1);
    for (int j = 0; j <= m; ++j) prev[j] = 2.0 * j * h;

    std::vector<double> out;
    out.reserve(n_max);
    out.push_back(prev[m]);  // eta_1(t) = 2 sqrt(t)

    for (int level = 2; level <= n_max; ++level) {
        cur[0] = 0.0;
        for (int j = 1; j <= m; ++j) {
            // Trapezoid over u in [0, w_j]; the integrand at u = w_j is G(0) = 0.
            double acc = 0.5 * prev[j];  // u = 0 endpoint: G_{k-1}(w_j)
            for (int i = 1; i < j; ++i) {
                // Interpolate G_{k-1} at sqrt(w_j^2 - u_i^2) on the uniform grid.
                const double pos = std::sqrt(static_cast<double>(j) * j -
                                             static_cast<double>(i) * i);
                const int lo = static_cast<int>(pos);
                const double frac = pos - lo;
                const double g =
                    lo >= m ? prev[m] : prev[lo] + frac * (prev[lo + 1] - prev[lo]);
                acc += g;
            }
            cur[j] = 2.0 * acc * h;
        }
        prev.swap(cur);
        out.push_back(prev[m]);
    }
    return out;
}

double half_factorial(int n) {
    if (n < 0) throw std::invalid_argument("half_factorial: negative order");
    double f = 1.0;
    for (int j = 2; j <= n / 2; ++j) f *= j;
    return f;
}

double bound_In1(int n, double t, double bnorm) {
    if (n < 0) throw std::invalid_argument("bound_In1: negative order");
    const double base = 2.0 * std::sqrt(std::numbers::pi) / std::sqrt(std::numbers::e);
    return std::pow(base * bnorm, n) * std::pow(t, 0.5 * n) / half_factorial(n);
}

double davie_bound(int n, double t, double bnorm, double M) {
    if (n < 0) throw std::invalid_argument("davie_bound: negative order");
    if (!(M > 0.0)) throw std::invalid_argument("davie_bound: M must be positive");
    return std::pow(M * bnorm, n) * std::pow(t, 0.5 * n) / half_factorial(n);
}

double ordered_simplex_integral(double t, std::span<const double> gap_exponents,
                                double tail_exponent) {
    if (!(t > 0.0)) throw std::invalid_argument("ordered_simplex_integral: t must be positive");
    if (gap_exponents.empty())
        throw std::invalid_argument("ordered_simplex_integral: need at least one variable");
    if (!(tail_exponent > -1.0))
        throw std::invalid_argument("ordered_simplex_integral: tail exponent must exceed -1");
    for (double a : gap_exponents)
        if (!(a > -1.0))
            throw std::invalid_argument("ordered_simplex_integral: gap exponent must exceed -1");
    // Integrate innermost-first: each step is a Beta factor and bumps the
    // accumulated (t - s)-exponent.
    double coef = 1.0;
    double e = tail_exponent;
    for (std::size_t i = gap_exponents.size(); i-- > 0;) {
        const double a = gap_exponents[i];
        coef *= std::beta(a + 1.0, e + 1.0);
        e = a + e + 1.0;
    }
    return coef * std::pow(t, e);
}

}  // namespace mvlab
