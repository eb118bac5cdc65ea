#ifndef KNOPP_DYADIC_HPP
#define KNOPP_DYADIC_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace knopp
{

// Exact rationals. mpq_class keeps itself canonical as long as every value is
// built through make_rational / parse_rational (or arithmetic on such values).
using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational make_rational(const BigInt &num, const BigInt &den)
{
    if (den == 0) {
        throw std::invalid_argument("rational with zero denominator");
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational make_rational(long num, long den = 1)
{
    return make_rational(BigInt(num), BigInt(den));
}

namespace detail
{

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
        s.remove_suffix(1);
    }
    return s;
}

inline bool is_integer_literal(std::string_view s)
{
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    return true;
}

inline BigInt parse_integer(std::string_view s)
{
    s = trim(s);
    if (!is_integer_literal(s)) {
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    return BigInt(std::string(s), 10);
}

inline BigInt pow10(unsigned long e)
{
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

} // namespace detail

// Parses "p/q" or a plain integer into a canonical rational.
inline Rational parse_rational(std::string_view text)
{
    const auto s = detail::trim(text);
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) {
        return Rational(detail::parse_integer(s));
    }
    return make_rational(detail::parse_integer(s.substr(0, slash)), detail::parse_integer(s.substr(slash + 1)));
}

// Parses a decimal literal such as "0.375", "-2.5e-3" or "1e-12" exactly.
// Fractions "p/q" and integers are accepted as well.
inline Rational parse_decimal(std::string_view text)
{
    auto s = detail::trim(text);
    if (s.find('/') != std::string_view::npos) {
        return parse_rational(s);
    }
    long exp10 = 0;
    if (const auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
        const auto e = detail::parse_integer(s.substr(epos + 1));
        if (!e.fits_slong_p()) {
            throw std::invalid_argument("exponent out of range: '" + std::string(s) + "'");
        }
        exp10 = e.get_si();
        s = s.substr(0, epos);
    }
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    for (char c : s) {
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_point) {
                ++frac_digits;
            }
        } else {
            throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
        }
    }
    if (digits.empty()) {
        throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
    }
    BigInt num(digits, 10);
    if (negative) {
        num = -num;
    }
    const long shift = exp10 - frac_digits;
    if (shift >= 0) {
        return Rational(num * detail::pow10(static_cast<unsigned long>(shift)));
    }
    return make_rational(num, detail::pow10(static_cast<unsigned long>(-shift)));
}

inline std::string to_string(const Rational &q)
{
    return q.get_str(10);
}

// floor and ceiling of an exact rational
inline BigInt floor(const Rational &q)
{
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline BigInt ceil(const Rational &q)
{
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline bool is_integer(const Rational &q)
{
    return q.get_den() == 1;
}

// 2^e for an integer e, as an exact rational.
inline Rational pow2_rational(long e)
{
    Rational r(1);
    if (e >= 0) {
        mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    } else {
        mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    }
    return r;
}

// Exact binary rational numerator / 2^exponent in canonical form: the
// numerator is odd whenever exponent > 0 and the exponent is 0 for zero.
class DyadicRational
{
public:
    DyadicRational() = default;

    DyadicRational(long value) : num_(value) {} // NOLINT(google-explicit-constructor)

    DyadicRational(BigInt numerator, std::uint64_t exponent) : num_(std::move(numerator)), exp_(exponent)
    {
        normalize();
    }

    // 2^e for any integer e
    static DyadicRational pow2(long e)
    {
        if (e >= 0) {
            BigInt n(1);
            mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
            return DyadicRational(n, 0);
        }
        return DyadicRational(BigInt(1), static_cast<std::uint64_t>(-e));
    }

    static std::optional<DyadicRational> from_rational(const Rational &q)
    {
        const BigInt &den = q.get_den();
        if (mpz_popcount(den.get_mpz_t()) != 1) {
            return std::nullopt;
        }
        const auto e = static_cast<std::uint64_t>(mpz_scan1(den.get_mpz_t(), 0));
        return DyadicRational(q.get_num(), e);
    }

    // Exact conversion of a finite double.
    static DyadicRational from_double(double v)
    {
        Rational q(v);
        return *from_rational(q);
    }

    const BigInt &numerator() const noexcept
    {
        return num_;
    }
    std::uint64_t exponent() const noexcept
    {
        return exp_;
    }

    bool is_zero() const noexcept
    {
        return num_ == 0;
    }
    int sign() const noexcept
    {
        return sgn(num_);
    }

    Rational to_rational() const
    {
        Rational q(num_);
        mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exp_));
        return q;
    }

    double to_double() const
    {
        return to_rational().get_d();
    }

    // value * 2^k, exact
    DyadicRational scaled(long k) const
    {
        if (k >= 0) {
            const auto uk = static_cast<std::uint64_t>(k);
            if (uk <= exp_) {
                return DyadicRational(num_, exp_ - uk);
            }
            BigInt n = num_;
            mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(uk - exp_));
            return DyadicRational(n, 0);
        }
        return DyadicRational(num_, exp_ + static_cast<std::uint64_t>(-k));
    }

    DyadicRational operator-() const
    {
        DyadicRational r = *this;
        r.num_ = -r.num_;
        return r;
    }

    friend DyadicRational operator+(const DyadicRational &a, const DyadicRational &b)
    {
        const auto e = std::max(a.exp_, b.exp_);
        return DyadicRational(a.aligned(e) + b.aligned(e), e);
    }

    friend DyadicRational operator-(const DyadicRational &a, const DyadicRational &b)
    {
        return a + (-b);
    }

    friend DyadicRational operator*(const DyadicRational &a, const DyadicRational &b)
    {
        return DyadicRational(a.num_ * b.num_, a.exp_ + b.exp_);
    }

    DyadicRational &operator+=(const DyadicRational &o)
    {
        return *this = *this + o;
    }
    DyadicRational &operator-=(const DyadicRational &o)
    {
        return *this = *this - o;
    }

    friend bool operator==(const DyadicRational &a, const DyadicRational &b)
    {
        return a.exp_ == b.exp_ && a.num_ == b.num_;
    }

    friend std::strong_ordering operator<=>(const DyadicRational &a, const DyadicRational &b)
    {
        const auto e = std::max(a.exp_, b.exp_);
        const int c = cmp(a.aligned(e), b.aligned(e));
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    // floor(value) as an integer
    BigInt floor() const
    {
        BigInt r;
        mpz_fdiv_q_2exp(r.get_mpz_t(), num_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
        return r;
    }

    DyadicRational abs() const
    {
        return num_ < 0 ? -*this : *this;
    }

    // "n/2^e", or just "n" when the exponent is zero
    std::string to_string() const
    {
        if (exp_ == 0) {
            return num_.get_str(10);
        }
        return num_.get_str(10) + "/2^" + std::to_string(exp_);
    }

private:
    BigInt aligned(std::uint64_t e) const
    {
        BigInt n = num_;
        mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(e - exp_));
        return n;
    }

    void normalize()
    {
        if (num_ == 0) {
            exp_ = 0;
            return;
        }
        if (exp_ == 0) {
            return;
        }
        const auto tz = static_cast<std::uint64_t>(mpz_scan1(num_.get_mpz_t(), 0));
        const auto s = std::min(tz, exp_);
        if (s > 0) {
            mpz_fdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
            exp_ -= s;
        }
    }

    BigInt num_{0};
    std::uint64_t exp_{0};
};

// Accepts "n/2^e", "n/d" with d a power of two, integers and exact decimals
// ("0.375"). Anything that is not a binary rational is rejected.
inline DyadicRational parse_dyadic(std::string_view text)
{
    const auto s = detail::trim(text);
    if (const auto caret = s.find("/2^"); caret != std::string_view::npos) {
        const auto n = detail::parse_integer(s.substr(0, caret));
        const auto e = detail::parse_integer(s.substr(caret + 3));
        if (e < 0 || !e.fits_ulong_p()) {
            throw std::invalid_argument("bad dyadic exponent in '" + std::string(s) + "'");
        }
        return DyadicRational(n, e.get_ui());
    }
    const auto q = parse_decimal(s);
    auto d = DyadicRational::from_rational(q);
    if (!d) {
        throw std::invalid_argument("'" + std::string(s) + "' is not a dyadic rational");
    }
    return *d;
}

} // namespace knopp

#endif
