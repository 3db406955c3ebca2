#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvlab/drift.hpp"
#include "mvlab/ensemble.hpp"
#include "mvlab/grid.hpp"

namespace mvlab {

// Deterministic value of I_n = int_{0<s_1<...<s_n<t} E prod b'(W_{s_i}) ds by
// nested Gauss-Legendre in time and Gauss-Hermite over the increments.  Cost
// grows like (time_nodes * gh_nodes)^n; intended for n <= 3.
double estimate_In_quadrature(const DriftSpec& spec, int n, double t, int time_nodes,
                              int gh_nodes);

// Monte Carlo I_n for n = 1..n_max at once, via I_n = E[A^n] / n! with
// A = int_0^t b'(W_s) ds along simulated Brownian paths.
std::vector<Estimate> estimate_In_mc(const DriftSpec& spec, int n_max, double t, double dt,
                                     std::size_t paths, std::uint64_t seed, int workers);

// Two sides of the Gaussian integration-by-parts identity on a fixed grid:
// E prod_i b'(W_{s_i})  versus  E [ prod_i b(W_{s_i}) * Lambda_n ].
double ibp_expectation_lhs(const TimeGrid<double>& grid, const DriftSpec& spec, int gh_nodes);
double ibp_expectation_rhs(const TimeGrid<double>& grid, const DriftSpec& spec, int gh_nodes);

// Importance-sampled simplex term
//   int_{0<s_1<...<s_n<t} E prod_i b(y_i) d^{k_i}q/dx^{k_i} / q (ds_i, dy_i)
// with ordered uniform times and Gaussian bridge increments as the proposal;
// orders[i] is the kernel derivative order of factor i.  Weights for orders
// >= 1 have heavy tails, so the reported std_error is a rough guide only.
Estimate estimate_term(std::span<const int> orders, const DriftSpec& spec, double t,
                       std::size_t samples, std::uint64_t seed, int workers);

struct DavieProbe {
    std::vector<Estimate> moments;  // I_n estimates, n = 1..n_max
    std::vector<double> normalized; // (|I_n| floor(n/2)!)^{1/n} / (bnorm sqrt(t))
    double slope = 0.0;             // least-squares slope of normalized vs n
};
DavieProbe probe_davie(const DriftSpec& spec, int n_max, double t, double dt,
                       std::size_t paths, std::uint64_t seed, int workers);

// E |Lambda_2| on the grid {s1, s2}: exact folded-normal reduction in the
// first increment, adaptive quadrature in the second.
double lambda_abs_mean(double s1, double s2);

// E |G^2 - 1| for standard normal G, by adaptive quadrature split at the kink.
double abs_moment_g2m1();

}  // namespace mvlab
