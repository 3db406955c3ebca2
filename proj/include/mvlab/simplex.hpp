#pragma once

#include <span>
#include <vector>

namespace mvlab {

inline constexpr int kMaxEtaOrder = 12;

// Wallis integral W(k) = int_0^{pi/2} sin^k(theta) dtheta via the recurrence
// W(k) = (k-1)/k W(k-2), W(0) = pi/2, W(1) = 1.
double wallis(int k);

// Unit-ball volume v_n = 2^n prod_{k=1}^n W(k); v_0 = 1.
double ball_volume(int n);

// A(alpha) = int_0^1 (1 - tau)^alpha tau^{-1/2} dtau computed by quadrature
// (substituting tau = sin^2 theta); equals 2 W(2 alpha + 1).
double a_alpha(double alpha);

// eta_n(t) = v_n t^{n/2}: closed form of the singular simplex integral
// int_{0<s_1<...<s_n<t} prod (s_i - s_{i-1})^{-1/2} ds.
double eta_closed(int n, double t);

// The same nested integral computed numerically through the convolution
// recursion rho_k = rho_{k-1} * r^{-1/2} with the substitution r = u^2 on a
// uniform u-grid; returns values for n = 1..n_max. Never consults the closed
// form.
std::vector<double> eta_quadrature(int n_max, double t, int u_points = 4000);

// n-th series coefficient bound (2 sqrt(pi) / sqrt(e))^n bnorm^n t^{n/2} / floor(n/2)!.
double bound_In1(int n, double t, double bnorm);

// Davie-style surrogate bound M^n bnorm^n t^{n/2} / floor(n/2)!.
double davie_bound(int n, double t, double bnorm, double M);

// floor(n/2)! as a double.
double half_factorial(int n);

// int_{0<s_1<...<s_n<t} prod_i (s_i - s_{i-1})^{a_i} (t - s_n)^{a_tail} ds
// via the Beta-function chain; every exponent must exceed -1.
double ordered_simplex_integral(double t, std::span<const double> gap_exponents,
                                double tail_exponent);

}  // namespace mvlab
