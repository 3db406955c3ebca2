#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdlib>
#include <string>

namespace mvlab {

// Exact coefficient type for the symbolic Gaussian algebra. GMP rationals
// never overflow, which matters for degree-16 Wick sums whose intermediate
// denominators grow as lcm's of covariance-entry denominators.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }
inline double to_double(double x) { return x; }

// The algebra is generic over the coefficient type: double for numeric
// pipelines, Rational for coefficient-exact identity tests.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    // Canonicalization threshold: terms below this are float noise, not data.
    static bool negligible(double v) { return std::abs(v) < 1e-14; }
    static double fraction(long num, long den) {
        return static_cast<double>(num) / static_cast<double>(den);
    }
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static bool negligible(const Rational& v) { return v == 0; }
    static Rational fraction(long num, long den) { return make_rational(num, den); }
};

}  // namespace mvlab
