#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace mvlab {

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

// Worker count resolution: explicit request wins, then the PARALLELISM
// environment variable, then hardware concurrency.
int resolve_workers(int requested);

struct MomentSums {
    std::vector<double> sum;
    std::vector<double> sumsq;
    std::size_t count = 0;
};

inline Estimate to_estimate(const MomentSums& s, std::size_t i = 0) {
    Estimate e;
    e.count = s.count;
    if (s.count == 0) return e;
    const double n = static_cast<double>(s.count);
    e.value = s.sum[i] / n;
    if (s.count > 1) {
        const double var = (s.sumsq[i] - s.sum[i] * s.sum[i] / n) / (n - 1.0);
        e.std_error = var > 0.0 ? std::sqrt(var / n) : 0.0;
    }
    return e;
}

// Parallel map-reduce over replicate indices. The statistic callback fills a
// dim-sized row for one replicate. Partial sums are kept per fixed 256-index
// chunk and reduced sequentially by chunk index, so the result is bitwise
// independent of the worker count.
template <class F>
MomentSums ensemble_moments(std::size_t count, std::size_t dim, int workers, F&& f) {
    if (dim == 0) throw std::invalid_argument("ensemble_moments: empty statistic");
    constexpr std::size_t kChunk = 256;
    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> partial(chunks);

    const int nw = resolve_workers(workers);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        std::vector<double> row(dim);
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            std::vector<double>& acc = partial[c];
            acc.assign(2 * dim, 0.0);
            const std::size_t lo = c * kChunk;
            const std::size_t hi = lo + kChunk < count ? lo + kChunk : count;
            for (std::size_t idx = lo; idx < hi; ++idx) {
                f(idx, std::span<double>(row));
                for (std::size_t d = 0; d < dim; ++d) {
                    acc[d] += row[d];
                    acc[dim + d] += row[d] * row[d];
                }
            }
        }
    };

    if (nw <= 1 || chunks <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int spawn = nw < static_cast<int>(chunks) ? nw : static_cast<int>(chunks);
        pool.reserve(spawn);
        for (int w = 0; w < spawn; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    MomentSums sums;
    sums.sum.assign(dim, 0.0);
    sums.sumsq.assign(dim, 0.0);
    sums.count = count;
    for (const std::vector<double>& acc : partial) {
        if (acc.empty()) continue;
        for (std::size_t d = 0; d < dim; ++d) {
            sums.sum[d] += acc[d];
            sums.sumsq[d] += acc[dim + d];
        }
    }
    return sums;
}

}  // namespace mvlab
