#pragma once

#include <functional>
#include <vector>

namespace mvlab {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1] (weight function 1). Cached per order.
const QuadRule& gauss_legendre(int n);

// Gauss-Legendre rule mapped to [a, b].
QuadRule gauss_legendre_on(int n, double a, double b);

// Gauss-Hermite rule normalized for the standard normal: sum_i w_i f(x_i)
// approximates E[f(G)], G ~ N(0,1), and sum_i w_i = 1. Cached per order.
const QuadRule& gauss_hermite_unit(int n);

// Adaptive Simpson integration to an absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 28);

}  // namespace mvlab
