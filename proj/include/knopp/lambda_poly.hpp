#ifndef KNOPP_LAMBDA_POLY_HPP
#define KNOPP_LAMBDA_POLY_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dyadic.hpp"
#include "enclosure.hpp"

namespace knopp
{

// Finite sum sum_k c_k * lambda^k with exact rational coefficients. The
// coefficient list never ends in a zero, so the zero polynomial is empty.
class LambdaPoly
{
public:
    LambdaPoly() = default;

    explicit LambdaPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs))
    {
        trim();
    }

    LambdaPoly(std::initializer_list<Rational> coeffs) : c_(coeffs)
    {
        trim();
    }

    // c * lambda^k
    static LambdaPoly monomial(const Rational &c, std::size_t k)
    {
        std::vector<Rational> v(k + 1);
        v[k] = c;
        return LambdaPoly(std::move(v));
    }

    const std::vector<Rational> &coefficients() const noexcept
    {
        return c_;
    }

    // coefficient of lambda^k, zero beyond the stored range
    Rational operator[](std::size_t k) const
    {
        return k < c_.size() ? c_[k] : Rational(0);
    }

    bool is_zero() const noexcept
    {
        return c_.empty();
    }

    // -1 for the zero polynomial
    long degree() const noexcept
    {
        return static_cast<long>(c_.size()) - 1;
    }

    friend LambdaPoly operator+(const LambdaPoly &a, const LambdaPoly &b)
    {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t k = 0; k < r.size(); ++k) {
            r[k] = a[k] + b[k];
        }
        return LambdaPoly(std::move(r));
    }

    friend LambdaPoly operator-(const LambdaPoly &a, const LambdaPoly &b)
    {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t k = 0; k < r.size(); ++k) {
            r[k] = a[k] - b[k];
        }
        return LambdaPoly(std::move(r));
    }

    LambdaPoly operator-() const
    {
        std::vector<Rational> r(c_.size());
        for (std::size_t k = 0; k < r.size(); ++k) {
            r[k] = -c_[k];
        }
        return LambdaPoly(std::move(r));
    }

    friend LambdaPoly operator*(const Rational &s, const LambdaPoly &p)
    {
        std::vector<Rational> r(p.c_.size());
        for (std::size_t k = 0; k < r.size(); ++k) {
            r[k] = s * p.c_[k];
        }
        return LambdaPoly(std::move(r));
    }

    LambdaPoly &operator+=(const LambdaPoly &o)
    {
        return *this = *this + o;
    }

    // in-place accumulation of c * lambda^k
    void add_term(const Rational &c, std::size_t k)
    {
        if (c == 0) {
            return;
        }
        if (c_.size() <= k) {
            c_.resize(k + 1);
        }
        c_[k] += c;
        trim();
    }

    friend bool operator==(const LambdaPoly &a, const LambdaPoly &b)
    {
        return a.c_ == b.c_;
    }

    // Exact value at a rational lambda.
    Rational evaluate(const Rational &lambda) const
    {
        Rational acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc = acc * lambda + *it;
        }
        return acc;
    }

    std::string to_string() const
    {
        std::string s = "[";
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (k) {
                s += ", ";
            }
            s += knopp::to_string(c_[k]);
        }
        return s + "]";
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0) {
            c_.pop_back();
        }
    }

    std::vector<Rational> c_;
};

// Enclosure of p(lambda). A point enclosure of lambda is an exact binary
// number, so that case is evaluated exactly and rounded once at the end.
inline Enclosure lambdapoly_eval(const LambdaPoly &p, const Enclosure &lambda)
{
    if (lambda.is_point()) {
        return Enclosure(p.evaluate(lambda.lo_rational()), lambda.prec());
    }
    const auto &c = p.coefficients();
    Enclosure acc(0L, lambda.prec());
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * lambda + *it;
    }
    return acc;
}

} // namespace knopp

#endif
