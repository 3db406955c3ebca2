#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "mvlab/cameron_martin.hpp"
#include "mvlab/grid.hpp"
#include "mvlab/polynomial.hpp"

namespace mvlab {

inline constexpr unsigned kMaxDivergenceOrder = 8;
inline constexpr unsigned kMaxExpectationDegree = 16;

inline Monomial variable_monomial(std::size_t vars, std::size_t i) {
    Monomial m(vars, 0);
    m[i] = 1;
    return m;
}

// Skorokhod integral of a deterministic step direction: delta(h) is the
// Wiener integral sum_k h'_k (W_{s_k} - W_{s_{k-1}}), expressed in the grid
// variables. Requires the knots of h to lie on the grid (plus 0), so the
// result stays inside the grid algebra.
template <class S>
GaussianPolynomial<S> divergence_of(const TimeGrid<S>& grid, const CameronMartinVector<S>& h) {
    const std::size_t n = grid.size();
    for (const S& k : h.knots()) {
        if (k == S(0)) continue;
        bool on_grid = false;
        for (std::size_t i = 0; i < n; ++i)
            if (k == grid.time(i)) {
                on_grid = true;
                break;
            }
        if (!on_grid)
            throw std::invalid_argument("divergence_of: direction has a knot off the grid");
    }
    GaussianPolynomial<S> p(n);
    for (std::size_t k = 0; k < n; ++k) {
        // Coefficient of W_{s_k}: slope on (s_{k-1}, s_k) minus slope on (s_k, s_{k+1}).
        const S left = h.slope_after(k == 0 ? S(0) : grid.time(k - 1));
        const S right = h.slope_after(grid.time(k));
        const S c = left - right;
        if (!scalar_traits<S>::negligible(c)) p.add_term(variable_monomial(n, k), c);
    }
    return p;
}

// Malliavin derivative in direction h applied to a grid polynomial:
// D_h W_{s_i} = h(s_i), extended by the chain rule.
template <class S>
GaussianPolynomial<S> directional_derivative(const TimeGrid<S>& grid,
                                             const GaussianPolynomial<S>& p,
                                             const CameronMartinVector<S>& h) {
    const std::size_t n = grid.size();
    std::vector<S> hv;
    hv.reserve(n);
    for (std::size_t i = 0; i < n; ++i) hv.push_back(h.value(grid.time(i)));
    GaussianPolynomial<S> r(n);
    Monomial reduced(n);
    for (const auto& [m, c] : p.terms()) {
        for (std::size_t i = 0; i < n; ++i) {
            if (m[i] == 0 || scalar_traits<S>::negligible(hv[i])) continue;
            reduced = m;
            --reduced[i];
            r.add_term(reduced, S(c * S(static_cast<long>(m[i])) * hv[i]));
        }
    }
    return r;
}

// Product rule for the divergence with a deterministic direction:
// delta(h P) = delta(h) P - D_h P.
template <class S>
GaussianPolynomial<S> divergence_product(const TimeGrid<S>& grid, const CameronMartinVector<S>& h,
                                         const GaussianPolynomial<S>& p) {
    return divergence_of(grid, h) * p - directional_derivative(grid, p, h);
}

// Iterated divergence Lambda_{s_1...s_n} = delta(h_n delta(h_{n-1} ... delta(h_1)...))
// over the dual basis of the grid. Degree n, centered.
template <class S>
GaussianPolynomial<S> iterated_divergence(const TimeGrid<S>& grid) {
    const std::size_t n = grid.size();
    if (n > kMaxDivergenceOrder)
        throw std::invalid_argument("iterated_divergence: order capped at 8");
    const auto hs = dual_basis(grid);
    GaussianPolynomial<S> p = divergence_of(grid, hs[0]);
    for (std::size_t k = 1; k < n; ++k) p = divergence_product(grid, hs[k], p);
    return p;
}

template <class S>
S wick_monomial(const Matrix<S>& cov, const Monomial& m, std::map<Monomial, S>& memo) {
    unsigned total = 0;
    for (unsigned e : m) total += e;
    if (total == 0) return S(1);
    if (total % 2 == 1) return S(0);
    if (auto it = memo.find(m); it != memo.end()) return it->second;
    std::size_t i = 0;
    while (m[i] == 0) ++i;
    Monomial rest = m;
    --rest[i];
    S acc(0);
    Monomial next = rest;
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (rest[j] == 0) continue;
        next = rest;
        --next[j];
        acc += S(static_cast<long>(rest[j])) * cov[i][j] * wick_monomial(cov, next, memo);
    }
    memo.emplace(m, acc);
    return acc;
}

// Wick/Isserlis expectation of a grid polynomial under the Brownian marginal:
// odd monomials vanish, even ones sum covariance products over perfect
// pairings. Computed by the pairing recursion
//   E[W_i M] = sum_j mult_j(M) C_ij E[M / W_j]
// memoized on the exponent vector. The memo is call-local, so the function is
// pure and safe under concurrent use.
template <class S>
S wick_expectation(const TimeGrid<S>& grid, const GaussianPolynomial<S>& p) {
    if (p.degree() > kMaxExpectationDegree)
        throw std::invalid_argument("wick_expectation: degree capped at 16");
    const Matrix<S> cov = covariance_matrix(grid);
    std::map<Monomial, S> memo;
    S total(0);
    for (const auto& [m, c] : p.terms()) total += c * wick_monomial(cov, m, memo);
    return total;
}

}  // namespace mvlab
