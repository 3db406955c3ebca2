#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mvlab/rational.hpp"

namespace mvlab {

// Strictly increasing evaluation times 0 < s_1 < ... < s_n <= T for the
// finite-dimensional Brownian marginal (W_{s_1}, ..., W_{s_n}).
template <class S>
class TimeGrid {
  public:
    TimeGrid(std::vector<S> times, S horizon) : times_(std::move(times)), horizon_(horizon) {
        validate();
    }
    explicit TimeGrid(std::vector<S> times)
        : times_(std::move(times)), horizon_(times_.empty() ? S(0) : times_.back()) {
        validate();
    }

    std::size_t size() const { return times_.size(); }
    const std::vector<S>& times() const { return times_; }
    const S& time(std::size_t i) const { return times_[i]; }
    const S& horizon() const { return horizon_; }

    // Gap s_i - s_{i-1} with the convention s_{-1} = 0.
    S gap(std::size_t i) const { return i == 0 ? times_[0] : S(times_[i] - times_[i - 1]); }

  private:
    void validate() const {
        if (times_.empty()) throw std::invalid_argument("TimeGrid: empty time set");
        S prev(0);
        for (std::size_t i = 0; i < times_.size(); ++i) {
            if (!(times_[i] > prev))
                throw std::invalid_argument("TimeGrid: times must satisfy 0 < s_1 < ... < s_n");
            if constexpr (!scalar_traits<S>::exact) {
                if (times_[i] - prev <= 1e-14 * times_[i])
                    throw std::invalid_argument(
                        "TimeGrid: degenerate grid, times equal within 1e-14 relative");
            }
            prev = times_[i];
        }
        if (!(horizon_ >= times_.back()))
            throw std::invalid_argument("TimeGrid: horizon below last time");
    }

    std::vector<S> times_;
    S horizon_;
};

template <class S>
using Matrix = std::vector<std::vector<S>>;

// Covariance of the Brownian marginal: C_ij = s_i ^ s_j.
template <class S>
Matrix<S> covariance_matrix(const TimeGrid<S>& grid) {
    const std::size_t n = grid.size();
    Matrix<S> c(n, std::vector<S>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            c[i][j] = grid.time(i) < grid.time(j) ? grid.time(i) : grid.time(j);
    return c;
}

// Closed-form inverse of the min-covariance: symmetric tridiagonal with
//   diag_i  = (s_{i+1} - s_{i-1}) / ((s_i - s_{i-1})(s_{i+1} - s_i)),  s_0 = 0
//   diag_n  = 1 / (s_n - s_{n-1})
//   off_i   = -1 / (s_{i+1} - s_i).
template <class S>
Matrix<S> inverse_covariance(const TimeGrid<S>& grid) {
    const std::size_t n = grid.size();
    Matrix<S> m(n, std::vector<S>(n, S(0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n) {
            const S below = grid.gap(i);
            const S above = grid.gap(i + 1);
            m[i][i] = (below + above) / (below * above);
            m[i][i + 1] = S(-1) / above;
            m[i + 1][i] = m[i][i + 1];
        } else {
            m[i][i] = S(1) / grid.gap(i);
        }
    }
    return m;
}

template <class S>
Matrix<S> mat_mul(const Matrix<S>& a, const Matrix<S>& b) {
    const std::size_t n = a.size(), m = b[0].size(), k = b.size();
    Matrix<S> r(n, std::vector<S>(m, S(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l)
            for (std::size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
    return r;
}

}  // namespace mvlab
