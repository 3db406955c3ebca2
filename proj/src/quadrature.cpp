#include "mvlab/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mvlab {
namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the orthogonal
// polynomial recurrence, weights are mu0 times the squared first eigenvector
// components.
QuadRule golub_welsch(int n, const std::vector<double>& offdiag, double mu0) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        jac(k, k + 1) = offdiag[k];
        jac(k + 1, k) = offdiag[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

QuadRule make_legendre(int n) {
    std::vector<double> off(n > 0 ? n - 1 : 0);
    for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(n, off, 2.0);
}

QuadRule make_hermite_unit(int n) {
    // Physicists' Hermite recurrence (weight e^{-x^2}), then rescale to the
    // standard normal: node *= sqrt(2), weight /= sqrt(pi).
    std::vector<double> off(n > 0 ? n - 1 : 0);
    for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k / 2.0);
    QuadRule rule = golub_welsch(n, off, std::sqrt(std::numbers::pi));
    for (double& x : rule.nodes) x *= std::numbers::sqrt2;
    for (double& w : rule.weights) w /= std::sqrt(std::numbers::pi);
    return rule;
}

const QuadRule& cached(std::map<int, QuadRule>& cache, std::mutex& mu, int n,
                       QuadRule (*make)(int)) {
    if (n < 1) throw std::invalid_argument("quadrature order must be positive");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make(n)).first;
    return it->second;
}

double simpson_leaf(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_leaf(a, fa, flm, m, fm);
    const double right = simpson_leaf(m, fm, frm, b, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, make_legendre);
}

QuadRule gauss_legendre_on(int n, double a, double b) {
    const QuadRule& base = gauss_legendre(n);
    QuadRule rule;
    rule.nodes.resize(base.nodes.size());
    rule.weights.resize(base.weights.size());
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t k = 0; k < base.nodes.size(); ++k) {
        rule.nodes[k] = mid + half * base.nodes[k];
        rule.weights[k] = half * base.weights[k];
    }
    return rule;
}

const QuadRule& gauss_hermite_unit(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, make_hermite_unit);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson_leaf(a, fa, fm, b, fb);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace mvlab
