#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvlab/cameron_martin.hpp"
#include "mvlab/drift.hpp"
#include "mvlab/ensemble.hpp"

namespace mvlab {

// One Euler path with its driving noise retained, so derivative checks can
// re-run the scheme under perturbed increments.
struct PathSample {
    double x0 = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t substream = 0;
    std::vector<double> noise;   // increments dW_k, size steps
    std::vector<double> wiener;  // running Brownian sum, size steps + 1
    std::vector<double> states;  // Euler states, size steps + 1

    std::size_t steps() const { return noise.size(); }
    double horizon() const { return dt * static_cast<double>(steps()); }
};

// Number of steps for horizon t at mesh dt; t must be an integer multiple of
// dt within 1e-9 relative.
std::size_t step_count(double t, double dt);

PathSample simulate_path(const DriftSpec& spec, double x0, double t, double dt,
                         std::uint64_t seed, std::uint64_t substream);

// Run the scheme from x0 under externally supplied increments (common-noise
// lattices, Cameron-Martin shifts).
PathSample drive_path(const DriftSpec& spec, double x0, double dt, std::span<const double> noise);

// Cumulative trapezoid of b'(X) along the path: out[k] = int_0^{k dt} b'(X_s) ds.
std::vector<double> bprime_cumulative(const PathSample& path, const DriftSpec& spec);

// Flow derivative X'_t = exp(int_0^t b'(X_s) ds).
double flow_derivative(const PathSample& path, const DriftSpec& spec);

// Two-time flow X'_{t,s} = exp(C[to] - C[from]) from a cumulative table.
double flow_transition(std::span<const double> cumulative, std::size_t from, std::size_t to);

// Girsanov weight N_t = exp(-sum b(X_k) dW_k - 1/2 sum b(X_k)^2 dt).
double girsanov_weight(const PathSample& path, const DriftSpec& spec);

// Duhamel form of the Malliavin derivative: D_h X_t = int_0^t X'_{t,s} h'(s) ds.
// h must have its knots on the path time grid.
double malliavin_derivative_path(const PathSample& path, const DriftSpec& spec,
                                 const CameronMartinVector<double>& h);

// Independent oracle: re-run the scheme with increments shifted by
// +/- eps h'_k dt and difference the endpoints.
double wiener_shift_derivative(const PathSample& path, const DriftSpec& spec,
                               const CameronMartinVector<double>& h, double eps);

// sqrt(int_0^t |X'_{t,tau}|^2 dtau): the Cameron-Martin norm of the gradient.
double gradient_norm(const PathSample& path, const DriftSpec& spec);

struct ExpMomentResult {
    Estimate lhs;        // E exp(p int_0^t b'(X))
    double rhs = 0.0;    // exp(|b|^2 T / 2) sqrt(E exp(2p int_0^t b'(x0 + W)))
    double rhs_std_error = 0.0;
    bool holds = false;  // lhs <= rhs within 3 combined SE
};
ExpMomentResult exp_moment_check(const DriftSpec& spec, double p, double x0, double t, double T,
                                 double dt, std::size_t paths, std::uint64_t seed, int workers);

struct GirsanovResult {
    Estimate weight_mean;  // E[N_t], target 1
    Estimate weighted_x2;  // E[X_t^2 N_t], target x0^2 + t
};
GirsanovResult girsanov_check(const DriftSpec& spec, double x0, double t, double dt,
                              std::size_t paths, std::uint64_t seed, int workers);

// Partial sum of sum_n x^n / floor(n/2)!; for x >= 0 the series sums to
// (1 + x) exp(x^2).
double series_half_factorial(double x, int terms);
double series_closed_form(double x);

// Flow moment bound (1 + 2 p M sqrt(t) bnorm) exp((1 + 2 p^2 M^2) T bnorm^2).
double moment_bound_value(double p, double t, double T, double bnorm, double M);

// E of the W^p_1(-R,R) integral |X_t(x)|^p + |X'_t(x)|^p over a common-noise
// x-lattice, one noise draw per replicate.
Estimate sobolev_norm_estimate(const DriftSpec& spec, double t, double dt, double R, double p,
                               int x_res, std::size_t replicates, std::uint64_t seed,
                               int workers);

struct TimeContinuityResult {
    std::vector<double> gaps;
    std::vector<Estimate> moments;  // E || X_{t1+gap} - X_{t1} ||^q per gap
    double slope = 0.0;             // log-log fit; target q/2
};
TimeContinuityResult time_continuity_check(const DriftSpec& spec, double t1,
                                           std::span<const double> gaps, double q, double p,
                                           double R, int x_res, double dt,
                                           std::size_t replicates, std::uint64_t seed,
                                           int workers);

}  // namespace mvlab
