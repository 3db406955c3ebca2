#pragma once

#include <span>
#include <vector>

#include "mvlab/grid.hpp"

namespace mvlab {

// Per-factor derivative-order cap and product-length cap.
inline constexpr int kMaxKernelDerivative = 10;
inline constexpr int kMaxKernelFactors = 8;
// Below this density value the mixed-partial ratio switches to the
// Hermite-ratio form, which never touches the underflowing exponential.
inline constexpr double kDensityFloor = 1e-280;

// q_t(x) = exp(-x^2 / 2t) / sqrt(2 pi t), t > 0.
double heat_kernel(double t, double x);
double log_heat_kernel(double t, double x);

// Probabilists' Hermite polynomial He_k.
double hermite_he(int k, double z);

// d^k/dx^k q_t(x) = (-1)^k t^{-k/2} He_k(x / sqrt t) q_t(x).
double kernel_derivative(double t, double x, int k);

// q_t^{(k)}(x) / q_t(x), evaluated without the exponential factor.
double kernel_ratio(int k, double t, double x);

// One summand of the mixed partial of the product density: derivative orders
// per increment factor plus a sign.
struct KernelTerm {
    std::vector<int> orders;
    int sign;
    bool operator==(const KernelTerm&) const = default;
};

// Symbolic expansion of d^n Q / dy_1 ... dy_n for the n-factor product
// density. d/dy_i raises the order of factor i (same sign) and of factor i+1
// (opposite sign); the last factor has no successor. 2^{n-1} terms, returned
// in canonical lexicographic order.
std::vector<KernelTerm> mixed_partial_terms(int n);

// Q(s, y) = prod_i q_{s_i - s_{i-1}}(y_i - y_{i-1}).
double product_density(std::span<const double> times, std::span<const double> y);
double log_product_density(std::span<const double> times, std::span<const double> y);

// Value of d^n Q / dy_1 ... dy_n via the term expansion.
double mixed_partial_value(std::span<const double> times, std::span<const double> y);

// (d^n Q / dy_1 ... dy_n) / Q via Hermite ratios; stable for underflowing Q.
double mixed_partial_over_density(std::span<const double> times, std::span<const double> y);

// Q^{-1} d^n Q - (-1)^n Lambda(y): the pointwise defect of the divergence
// representation of the density's mixed partial.
double representation_residual(const TimeGrid<double>& grid, std::span<const double> y);

}  // namespace mvlab
