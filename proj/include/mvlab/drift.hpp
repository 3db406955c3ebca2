#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mvlab {

// A drift coefficient b together with the metadata the estimators need.
// bound is sup|b| (infinite for the out-of-hypotheses linear ramp);
// within_hypotheses marks membership in the bounded-Borel class.
struct DriftSpec {
    std::string name;
    double bound = 0.0;
    bool has_derivative = false;
    bool smooth = false;
    bool within_hypotheses = true;
    std::function<double(double)> b;
    std::function<double(double)> bprime;
};

const std::vector<std::string>& drift_names();

// Look up a registry drift by name with optional parameters:
//   zero | const [c=1] | sin | cos | scaled_tanh [a=1] | sign | linear_test [c=-1]
DriftSpec get_drift(const std::string& name, std::span<const double> params = {});

double eval_b(const DriftSpec& spec, double x);
double eval_bprime(const DriftSpec& spec, double x);

// Convolution with the compactly supported bump phi_n(x) = n phi(n x),
// phi(x) = C exp(-1/(1-x^2)) on (-1,1). The smoothing preserves the sup
// bound; the returned spec always carries a derivative.
DriftSpec mollify(const DriftSpec& base, int level);

}  // namespace mvlab
