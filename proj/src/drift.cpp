#include "mvlab/drift.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "mvlab/quadrature.hpp"

namespace mvlab {
namespace {

void expect_params(const std::string& name, std::span<const double> params, std::size_t max) {
    if (params.size() > max)
        throw std::invalid_argument("drift '" + name + "': too many parameters");
}

double param_or(std::span<const double> params, double fallback) {
    return params.empty() ? fallback : params[0];
}

// Unnormalized bump on (-1, 1).
double bump_raw(double x) {
    const double s = 1.0 - x * x;
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

// Normalization constant of the bump, computed once.
double bump_norm() {
    static const double c = [] {
        const QuadRule rule = gauss_legendre_on(200, -1.0, 1.0);
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * bump_raw(rule.nodes[i]);
        return 1.0 / acc;
    }();
    return c;
}

double bump(double x) { return bump_norm() * bump_raw(x); }

double bump_deriv(double x) {
    const double s = 1.0 - x * x;
    if (s <= 0.0) return 0.0;
    return bump(x) * (-2.0 * x / (s * s));
}

}  // namespace

const std::vector<std::string>& drift_names() {
    static const std::vector<std::string> names = {"zero",        "const", "sin",
                                                   "cos",         "scaled_tanh", "sign",
                                                   "linear_test"};
    return names;
}

DriftSpec get_drift(const std::string& name, std::span<const double> params) {
    DriftSpec spec;
    spec.name = name;
    if (name == "zero") {
        expect_params(name, params, 0);
        spec.bound = 0.0;
        spec.has_derivative = spec.smooth = true;
        spec.b = [](double) { return 0.0; };
        spec.bprime = [](double) { return 0.0; };
    } else if (name == "const") {
        expect_params(name, params, 1);
        const double c = param_or(params, 1.0);
        spec.bound = std::abs(c);
        spec.has_derivative = spec.smooth = true;
        spec.b = [c](double) { return c; };
        spec.bprime = [](double) { return 0.0; };
    } else if (name == "sin") {
        expect_params(name, params, 0);
        spec.bound = 1.0;
        spec.has_derivative = spec.smooth = true;
        spec.b = [](double x) { return std::sin(x); };
        spec.bprime = [](double x) { return std::cos(x); };
    } else if (name == "cos") {
        expect_params(name, params, 0);
        spec.bound = 1.0;
        spec.has_derivative = spec.smooth = true;
        spec.b = [](double x) { return std::cos(x); };
        spec.bprime = [](double x) { return -std::sin(x); };
    } else if (name == "scaled_tanh") {
        expect_params(name, params, 1);
        const double a = param_or(params, 1.0);
        spec.bound = std::abs(a);
        spec.has_derivative = spec.smooth = true;
        spec.b = [a](double x) { return a * std::tanh(x); };
        spec.bprime = [a](double x) {
            const double th = std::tanh(x);
            return a * (1.0 - th * th);
        };
    } else if (name == "sign") {
        expect_params(name, params, 0);
        spec.bound = 1.0;
        spec.has_derivative = false;
        spec.smooth = false;
        spec.b = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
    } else if (name == "linear_test") {
        expect_params(name, params, 1);
        const double c = param_or(params, -1.0);
        spec.bound = std::numeric_limits<double>::infinity();
        spec.has_derivative = spec.smooth = true;
        spec.within_hypotheses = false;  // unbounded; calibration only
        spec.b = [c](double x) { return c * x; };
        spec.bprime = [c](double) { return c; };
    } else {
        throw std::invalid_argument("unknown drift '" + name + "'");
    }
    return spec;
}

double eval_b(const DriftSpec& spec, double x) { return spec.b(x); }

double eval_bprime(const DriftSpec& spec, double x) {
    if (!spec.has_derivative || !spec.bprime)
        throw std::runtime_error("drift '" + spec.name +
                                 "' has no pointwise derivative; mollify() it first");
    return spec.bprime(x);
}

DriftSpec mollify(const DriftSpec& base, int level) {
    if (level < 1) throw std::invalid_argument("mollify: level must be >= 1");
    const QuadRule& rule = gauss_legendre(64);
    // Precompute bump and bump' at the fixed nodes; evaluation then costs one
    // base-drift call per node.
    std::vector<double> wphi(rule.nodes.size()), wphid(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        wphi[i] = rule.weights[i] * bump(rule.nodes[i]);
        wphid[i] = rule.weights[i] * bump_deriv(rule.nodes[i]);
    }
    const auto nodes = rule.nodes;
    const auto fb = base.b;
    const double n = static_cast<double>(level);

    DriftSpec spec;
    char buf[64];
    std::snprintf(buf, sizeof buf, "mollify(%s,%d)", base.name.c_str(), level);
    spec.name = buf;
    spec.bound = base.bound;
    spec.has_derivative = true;
    spec.smooth = true;
    spec.within_hypotheses = base.within_hypotheses;
    spec.b = [nodes, wphi, fb, n](double x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += wphi[i] * fb(x - nodes[i] / n);
        return acc;
    };
    spec.bprime = [nodes, wphid, fb, n](double x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += wphid[i] * fb(x - nodes[i] / n);
        return n * acc;
    };
    return spec;
}

}  // namespace mvlab
