#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mvlab/grid.hpp"
#include "mvlab/rational.hpp"

namespace mvlab {

// Cameron-Martin direction with piecewise-constant derivative: h(0) = 0,
// h'(tau) = slope_k on [knot_{k-1}, knot_k), and h'(tau) = 0 past the last
// knot. knots_[0] is always 0.
template <class S>
class CameronMartinVector {
  public:
    CameronMartinVector(std::vector<S> knots, std::vector<S> slopes)
        : knots_(std::move(knots)), slopes_(std::move(slopes)) {
        if (knots_.empty() || !(knots_.front() == S(0)))
            throw std::invalid_argument("CameronMartinVector: knots must start at 0");
        if (slopes_.size() + 1 != knots_.size())
            throw std::invalid_argument("CameronMartinVector: need one slope per interval");
        for (std::size_t i = 1; i < knots_.size(); ++i)
            if (!(knots_[i] > knots_[i - 1]))
                throw std::invalid_argument("CameronMartinVector: knots must increase");
    }

    const std::vector<S>& knots() const { return knots_; }
    const std::vector<S>& slopes() const { return slopes_; }

    // h(tau): integral of the derivative up to tau.
    S value(const S& tau) const {
        S acc(0);
        for (std::size_t i = 0; i < slopes_.size(); ++i) {
            if (!(tau > knots_[i])) break;
            const S upper = tau < knots_[i + 1] ? tau : knots_[i + 1];
            acc += slopes_[i] * (upper - knots_[i]);
        }
        return acc;
    }

    // h'(tau+): the slope on the interval starting at or containing tau.
    S slope_after(const S& tau) const {
        if (!(tau < knots_.back())) return S(0);
        for (std::size_t i = slopes_.size(); i-- > 0;)
            if (!(tau < knots_[i])) return slopes_[i];
        return S(0);
    }

  private:
    std::vector<S> knots_;
    std::vector<S> slopes_;
};

// <h, g>_H = int h'(tau) g'(tau) dtau over the merged knot partition.
template <class S>
S inner_product(const CameronMartinVector<S>& a, const CameronMartinVector<S>& b) {
    std::vector<S> cuts;
    cuts.reserve(a.knots().size() + b.knots().size());
    std::size_t i = 0, j = 0;
    const auto& ka = a.knots();
    const auto& kb = b.knots();
    while (i < ka.size() || j < kb.size()) {
        S next = i < ka.size() && (j >= kb.size() || ka[i] < kb[j]) ? ka[i] : kb[j];
        while (i < ka.size() && ka[i] == next) ++i;
        while (j < kb.size() && kb[j] == next) ++j;
        cuts.push_back(next);
    }
    S acc(0);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        acc += a.slope_after(cuts[k]) * b.slope_after(cuts[k]) * (cuts[k + 1] - cuts[k]);
    return acc;
}

// zeta_{s_i}: the direction with <zeta_{s_i}, h> = h(s_i), i.e. slope 1 on
// [0, s_i) and 0 after.
template <class S>
CameronMartinVector<S> indicator_vector(const TimeGrid<S>& grid, std::size_t i) {
    return CameronMartinVector<S>({S(0), grid.time(i)}, {S(1)});
}

// Dual basis vector h_j = sum_i sigma^{-1}_{ij} zeta_{s_i}; satisfies
// h_j(s_i) = delta_ij. Slope on (s_{k-1}, s_k) is sum_{i >= k} sigma^{-1}_{ij}.
template <class S>
CameronMartinVector<S> dual_vector(const TimeGrid<S>& grid, const Matrix<S>& invcov,
                                   std::size_t j) {
    const std::size_t n = grid.size();
    std::vector<S> knots;
    knots.reserve(n + 1);
    knots.push_back(S(0));
    for (std::size_t k = 0; k < n; ++k) knots.push_back(grid.time(k));
    std::vector<S> slopes(n, S(0));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = k; i < n; ++i) slopes[k] += invcov[i][j];
    return CameronMartinVector<S>(std::move(knots), std::move(slopes));
}

template <class S>
std::vector<CameronMartinVector<S>> dual_basis(const TimeGrid<S>& grid) {
    const Matrix<S> inv = inverse_covariance(grid);
    std::vector<CameronMartinVector<S>> hs;
    hs.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) hs.push_back(dual_vector(grid, inv, j));
    return hs;
}

}  // namespace mvlab
