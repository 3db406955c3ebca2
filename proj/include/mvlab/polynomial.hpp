#pragma once

#include <cstddef>
#include <iterator>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvlab/rational.hpp"

namespace mvlab {

// Exponent vector of a monomial in the grid variables W_{s_1}, ..., W_{s_n}.
using Monomial = std::vector<unsigned>;

// Sparse polynomial in the Gaussian grid variables. The ordered map keeps a
// canonical term order so equality and printing are deterministic.
template <class S>
class GaussianPolynomial {
  public:
    explicit GaussianPolynomial(std::size_t vars) : vars_(vars) {}

    static GaussianPolynomial constant(std::size_t vars, S c) {
        GaussianPolynomial p(vars);
        p.add_term(Monomial(vars, 0), c);
        return p;
    }
    static GaussianPolynomial variable(std::size_t vars, std::size_t i, S c = S(1)) {
        GaussianPolynomial p(vars);
        Monomial m(vars, 0);
        m[i] = 1;
        p.add_term(m, c);
        return p;
    }

    std::size_t vars() const { return vars_; }
    const std::map<Monomial, S>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    unsigned degree() const {
        unsigned d = 0;
        for (const auto& [m, c] : terms_) {
            unsigned t = 0;
            for (unsigned e : m) t += e;
            if (t > d) d = t;
        }
        return d;
    }

    S coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? S(0) : it->second;
    }

    void add_term(const Monomial& m, const S& c) {
        if (m.size() != vars_) throw std::invalid_argument("GaussianPolynomial: arity mismatch");
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) it->second += c;
        if (scalar_traits<S>::negligible(it->second)) terms_.erase(it);
    }

    GaussianPolynomial& operator+=(const GaussianPolynomial& o) {
        check_arity(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    GaussianPolynomial& operator-=(const GaussianPolynomial& o) {
        check_arity(o);
        for (const auto& [m, c] : o.terms_) add_term(m, S(-c));
        return *this;
    }
    GaussianPolynomial& operator*=(const S& c) {
        if (scalar_traits<S>::negligible(c)) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, v] : terms_) v *= c;
        canonicalize();
        return *this;
    }

    friend GaussianPolynomial operator+(GaussianPolynomial a, const GaussianPolynomial& b) {
        a += b;
        return a;
    }
    friend GaussianPolynomial operator-(GaussianPolynomial a, const GaussianPolynomial& b) {
        a -= b;
        return a;
    }
    friend GaussianPolynomial operator*(const GaussianPolynomial& a, const GaussianPolynomial& b) {
        a.check_arity(b);
        GaussianPolynomial r(a.vars_);
        Monomial m(a.vars_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                for (std::size_t i = 0; i < a.vars_; ++i) m[i] = ma[i] + mb[i];
                r.add_term(m, S(ca * cb));
            }
        return r;
    }
    friend GaussianPolynomial operator*(GaussianPolynomial a, const S& c) {
        a *= c;
        return a;
    }

    bool operator==(const GaussianPolynomial& o) const {
        return vars_ == o.vars_ && terms_ == o.terms_;
    }

    // Drops terms whose coefficient the scalar mode treats as zero.
    void canonicalize() {
        for (auto it = terms_.begin(); it != terms_.end();)
            it = scalar_traits<S>::negligible(it->second) ? terms_.erase(it) : std::next(it);
    }

    template <class X>
    X evaluate(std::span<const X> point) const {
        if (point.size() != vars_) throw std::invalid_argument("evaluate: arity mismatch");
        X total(0);
        for (const auto& [m, c] : terms_) {
            X v(c);
            for (std::size_t i = 0; i < vars_; ++i)
                for (unsigned e = 0; e < m[i]; ++e) v *= point[i];
            total += v;
        }
        return total;
    }

    // Rewrites the polynomial over the increment variables V_i = W_{s_i} - W_{s_{i-1}}
    // (so W_{s_i} = V_1 + ... + V_i). Same arity, new basis.
    GaussianPolynomial to_increments() const {
        GaussianPolynomial r(vars_);
        for (const auto& [m, c] : terms_) {
            GaussianPolynomial t = constant(vars_, c);
            for (std::size_t i = 0; i < vars_; ++i) {
                if (m[i] == 0) continue;
                GaussianPolynomial prefix(vars_);
                for (std::size_t j = 0; j <= i; ++j) prefix += variable(vars_, j);
                for (unsigned e = 0; e < m[i]; ++e) t = t * prefix;
            }
            r += t;
        }
        return r;
    }

  private:
    void check_arity(const GaussianPolynomial& o) const {
        if (vars_ != o.vars_) throw std::invalid_argument("GaussianPolynomial: arity mismatch");
    }

    std::size_t vars_;
    std::map<Monomial, S> terms_;
};

}  // namespace mvlab
