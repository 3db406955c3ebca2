#include "mvlab/sde.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mvlab/rng.hpp"

namespace mvlab {

std::size_t step_count(double t, double dt) {
    if (!(t > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("step_count: horizon and mesh must be positive");
    }
    const long long steps = std::llround(t / dt);
    if (steps < 1 || std::abs(static_cast<double>(steps) * dt - t) > 1e-9 * std::max(1.0, t)) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "step_count: t=%.17g is not an integer multiple of dt=%.17g", t, dt);
        throw std::invalid_argument(msg);
    }
    return static_cast<std::size_t>(steps);
}

namespace {

// Shared Euler loop.  States are kept in the offset form
//   X_k = x0 + W_k + (drift sum), so a zero drift reproduces x0 + W_k exactly,
// increment for increment.
void run_euler(PathSample& path, const DriftSpec& spec) {
    const std::size_t n = path.noise.size();
    path.wiener.assign(n + 1, 0.0);
    path.states.assign(n + 1, 0.0);
    path.states[0] = path.x0;
    double drift_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        drift_sum += spec.b(path.states[k]) * path.dt;
        path.wiener[k + 1] = path.wiener[k] + path.noise[k];
        path.states[k + 1] = path.x0 + path.wiener[k + 1] + drift_sum;
    }
}

}  // namespace

PathSample simulate_path(const DriftSpec& spec, double x0, double t, double dt,
                         std::uint64_t seed, std::uint64_t substream) {
    const std::size_t steps = step_count(t, dt);
    PathSample path;
    path.x0 = x0;
    path.dt = dt;
    path.seed = seed;
    path.substream = substream;
    path.noise.resize(steps);
    RandomStream stream(seed, substream);
    const double root_dt = std::sqrt(dt);
    for (std::size_t k = 0; k < steps; ++k) {
        path.noise[k] = root_dt * stream.normal();
    }
    run_euler(path, spec);
    return path;
}

PathSample drive_path(const DriftSpec& spec, double x0, double dt, std::span<const double> noise) {
    if (noise.empty()) {
        throw std::invalid_argument("drive_path: need at least one increment");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("drive_path: mesh must be positive");
    }
    PathSample path;
    path.x0 = x0;
    path.dt = dt;
    path.noise.assign(noise.begin(), noise.end());
    run_euler(path, spec);
    return path;
}

std::vector<double> bprime_cumulative(const PathSample& path, const DriftSpec& spec) {
    const std::size_t n = path.steps();
    std::vector<double> cum(n + 1, 0.0);
    double prev = eval_bprime(spec, path.states[0]);
    for (std::size_t k = 0; k < n; ++k) {
        const double next = eval_bprime(spec, path.states[k + 1]);
        cum[k + 1] = cum[k] + 0.5 * path.dt * (prev + next);
        prev = next;
    }
    return cum;
}

double flow_derivative(const PathSample& path, const DriftSpec& spec) {
    return std::exp(bprime_cumulative(path, spec).back());
}

double flow_transition(std::span<const double> cumulative, std::size_t from, std::size_t to) {
    if (from >= cumulative.size() || to >= cumulative.size() || from > to) {
        throw std::invalid_argument("flow_transition: indices out of range");
    }
    return std::exp(cumulative[to] - cumulative[from]);
}

double girsanov_weight(const PathSample& path, const DriftSpec& spec) {
    double stoch = 0.0;
    double quad = 0.0;
    for (std::size_t k = 0; k < path.steps(); ++k) {
        const double bk = spec.b(path.states[k]);
        stoch += bk * path.noise[k];
        quad += bk * bk * path.dt;
    }
    return std::exp(-stoch - 0.5 * quad);
}

namespace {

void require_knots_on_grid(const CameronMartinVector<double>& h, double dt, double horizon) {
    for (double knot : h.knots()) {
        const double steps = knot / dt;
        if (std::abs(steps - std::round(steps)) > 1e-6 || knot > horizon * (1.0 + 1e-12)) {
            throw std::invalid_argument(
                "direction has a breakpoint off the path time grid; refine dt");
        }
    }
}

}  // namespace

double malliavin_derivative_path(const PathSample& path, const DriftSpec& spec,
                                 const CameronMartinVector<double>& h) {
    require_knots_on_grid(h, path.dt, path.horizon());
    const std::vector<double> cum = bprime_cumulative(path, spec);
    const double total = cum.back();
    double acc = 0.0;
    for (std::size_t k = 0; k < path.steps(); ++k) {
        const double rate = h.slope_after(path.dt * static_cast<double>(k));
        if (rate == 0.0) continue;
        const double left = std::exp(total - cum[k]);
        const double right = std::exp(total - cum[k + 1]);
        acc += rate * 0.5 * path.dt * (left + right);
    }
    return acc;
}

double wiener_shift_derivative(const PathSample& path, const DriftSpec& spec,
                               const CameronMartinVector<double>& h, double eps) {
    require_knots_on_grid(h, path.dt, path.horizon());
    std::vector<double> up(path.noise);
    std::vector<double> down(path.noise);
    for (std::size_t k = 0; k < path.steps(); ++k) {
        const double bump = eps * h.slope_after(path.dt * static_cast<double>(k)) * path.dt;
        up[k] += bump;
        down[k] -= bump;
    }
    const PathSample plus = drive_path(spec, path.x0, path.dt, up);
    const PathSample minus = drive_path(spec, path.x0, path.dt, down);
    return (plus.states.back() - minus.states.back()) / (2.0 * eps);
}

double gradient_norm(const PathSample& path, const DriftSpec& spec) {
    const std::vector<double> cum = bprime_cumulative(path, spec);
    const double total = cum.back();
    double acc = 0.0;
    double prev = std::exp(2.0 * total);
    for (std::size_t k = 0; k < path.steps(); ++k) {
        const double next = std::exp(2.0 * (total - cum[k + 1]));
        acc += 0.5 * path.dt * (prev + next);
        prev = next;
    }
    return std::sqrt(acc);
}

ExpMomentResult exp_moment_check(const DriftSpec& spec, double p, double x0, double t, double T,
                                 double dt, std::size_t paths, std::uint64_t seed, int workers) {
    if (!(t <= T)) {
        throw std::invalid_argument("exp_moment_check: need t <= T");
    }
    const DriftSpec driftless = get_drift("zero");
    const auto lhs_sums = ensemble_moments(
        paths, 1, workers, [&](std::uint64_t sub, std::span<double> out) {
            const PathSample path = simulate_path(spec, x0, t, dt, seed, sub);
            out[0] = std::exp(p * bprime_cumulative(path, spec).back());
        });
    // Independent driftless ensemble for the right side; substreams are offset
    // so no noise is shared with the left side.
    const auto rhs_sums = ensemble_moments(
        paths, 1, workers, [&](std::uint64_t sub, std::span<double> out) {
            const PathSample path = simulate_path(driftless, x0, t, dt, seed, paths + sub);
            out[0] = std::exp(2.0 * p * bprime_cumulative(path, spec).back());
        });

    ExpMomentResult result;
    result.lhs = to_estimate(lhs_sums, 0);
    const Estimate inner = to_estimate(rhs_sums, 0);
    const double prefactor = std::exp(0.5 * spec.bound * spec.bound * T);
    result.rhs = prefactor * std::sqrt(inner.value);
    // Delta method through sqrt.
    result.rhs_std_error = prefactor * inner.std_error / (2.0 * std::sqrt(inner.value));
    const double slack = 3.0 * (result.lhs.std_error + result.rhs_std_error);
    result.holds = result.lhs.value <= result.rhs + slack;
    return result;
}

GirsanovResult girsanov_check(const DriftSpec& spec, double x0, double t, double dt,
                              std::size_t paths, std::uint64_t seed, int workers) {
    const auto sums = ensemble_moments(
        paths, 2, workers, [&](std::uint64_t sub, std::span<double> out) {
            const PathSample path = simulate_path(spec, x0, t, dt, seed, sub);
            const double weight = girsanov_weight(path, spec);
            const double xt = path.states.back();
            out[0] = weight;
            out[1] = xt * xt * weight;
        });
    return GirsanovResult{to_estimate(sums, 0), to_estimate(sums, 1)};
}

double series_half_factorial(double x, int terms) {
    if (terms < 1) {
        throw std::invalid_argument("series_half_factorial: need at least one term");
    }
    // Terms grow before the factorial wins, so compensate the summation.
    double sum = 0.0;
    double carry = 0.0;
    double term = 1.0;  // x^n / floor(n/2)! at n = 0
    for (int n = 0; n < terms; ++n) {
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        term *= x;
        const int next = n + 1;
        if (next % 2 == 0) term /= static_cast<double>(next / 2);
    }
    return sum;
}

double series_closed_form(double x) { return (1.0 + x) * std::exp(x * x); }

double moment_bound_value(double p, double t, double T, double bnorm, double M) {
    return (1.0 + 2.0 * p * M * std::sqrt(t) * bnorm) *
           std::exp((1.0 + 2.0 * p * p * M * M) * T * bnorm * bnorm);
}

namespace {

std::vector<double> x_lattice(double R, int x_res) {
    if (x_res < 2) {
        throw std::invalid_argument("x lattice needs at least two points");
    }
    std::vector<double> xs(static_cast<std::size_t>(x_res));
    const double dx = 2.0 * R / static_cast<double>(x_res - 1);
    for (int i = 0; i < x_res; ++i) {
        xs[static_cast<std::size_t>(i)] = -R + dx * i;
    }
    xs.back() = R;
    return xs;
}

double trapezoid_weight(std::size_t i, std::size_t n, double dx) {
    return (i == 0 || i + 1 == n) ? 0.5 * dx : dx;
}

std::vector<double> draw_noise(std::uint64_t seed, std::uint64_t substream, std::size_t steps,
                               double dt) {
    RandomStream stream(seed, substream);
    std::vector<double> noise(steps);
    const double root_dt = std::sqrt(dt);
    for (std::size_t k = 0; k < steps; ++k) {
        noise[k] = root_dt * stream.normal();
    }
    return noise;
}

}  // namespace

Estimate sobolev_norm_estimate(const DriftSpec& spec, double t, double dt, double R, double p,
                               int x_res, std::size_t replicates, std::uint64_t seed,
                               int workers) {
    const std::size_t steps = step_count(t, dt);
    const std::vector<double> xs = x_lattice(R, x_res);
    const double dx = 2.0 * R / static_cast<double>(x_res - 1);
    const auto sums = ensemble_moments(
        replicates, 1, workers, [&](std::uint64_t sub, std::span<double> out) {
            const std::vector<double> noise = draw_noise(seed, sub, steps, dt);
            double integral = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const PathSample path = drive_path(spec, xs[i], dt, noise);
                const double xt = path.states.back();
                const double deriv = flow_derivative(path, spec);
                integral += trapezoid_weight(i, xs.size(), dx) *
                            (std::pow(std::abs(xt), p) + std::pow(deriv, p));
            }
            out[0] = integral;
        });
    return to_estimate(sums, 0);
}

TimeContinuityResult time_continuity_check(const DriftSpec& spec, double t1,
                                           std::span<const double> gaps, double q, double p,
                                           double R, int x_res, double dt,
                                           std::size_t replicates, std::uint64_t seed,
                                           int workers) {
    if (gaps.empty()) {
        throw std::invalid_argument("time_continuity_check: need at least one gap");
    }
    const std::size_t k1 = step_count(t1, dt);
    std::vector<std::size_t> k2(gaps.size());
    for (std::size_t g = 0; g < gaps.size(); ++g) {
        k2[g] = k1 + step_count(gaps[g], dt);
    }
    std::size_t max_steps = k1;
    for (std::size_t idx : k2) max_steps = std::max(max_steps, idx);
    const std::vector<double> xs = x_lattice(R, x_res);
    const double dx = 2.0 * R / static_cast<double>(x_res - 1);

    const auto sums = ensemble_moments(
        replicates, gaps.size(), workers, [&](std::uint64_t sub, std::span<double> out) {
            const std::vector<double> noise = draw_noise(seed, sub, max_steps, dt);
            std::vector<double> integrals(gaps.size(), 0.0);
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const PathSample path = drive_path(spec, xs[i], dt, noise);
                const std::vector<double> cum = bprime_cumulative(path, spec);
                const double x_t1 = path.states[k1];
                const double d_t1 = std::exp(cum[k1]);
                const double w = trapezoid_weight(i, xs.size(), dx);
                for (std::size_t g = 0; g < gaps.size(); ++g) {
                    const double fx = path.states[k2[g]] - x_t1;
                    const double fd = std::exp(cum[k2[g]]) - d_t1;
                    integrals[g] +=
                        w * (std::pow(std::abs(fx), p) + std::pow(std::abs(fd), p));
                }
            }
            for (std::size_t g = 0; g < gaps.size(); ++g) {
                out[g] = std::pow(integrals[g], q / p);
            }
        });

    TimeContinuityResult result;
    result.gaps.assign(gaps.begin(), gaps.end());
    result.moments.reserve(gaps.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t g = 0; g < gaps.size(); ++g) {
        const Estimate est = to_estimate(sums, g);
        result.moments.push_back(est);
        const double lx = std::log(gaps[g]);
        const double ly = std::log(est.value);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(gaps.size());
    result.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return result;
}

}  // namespace mvlab
