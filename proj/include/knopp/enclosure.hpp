#ifndef KNOPP_ENCLOSURE_HPP
#define KNOPP_ENCLOSURE_HPP

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include <mpfr.h>

#include "dyadic.hpp"

namespace knopp
{

// Significand bits of a freshly created enclosure unless a caller asks for more.
inline constexpr mpfr_prec_t kDefaultPrecision = 64;

namespace detail
{

// Owning handle for an mpfr_t.
class BigFloat
{
public:
    explicit BigFloat(mpfr_prec_t prec = kDefaultPrecision)
    {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    BigFloat(const BigFloat &o)
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat &&o) noexcept
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    BigFloat &operator=(const BigFloat &o)
    {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat &operator=(BigFloat &&o) noexcept
    {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat()
    {
        mpfr_clear(v_);
    }

    mpfr_ptr get() noexcept
    {
        return v_;
    }
    mpfr_srcptr get() const noexcept
    {
        return v_;
    }
    mpfr_prec_t prec() const noexcept
    {
        return mpfr_get_prec(v_);
    }

    Rational to_rational() const
    {
        Rational q;
        mpfr_get_q(q.get_mpq_t(), v_);
        return q;
    }

private:
    mpfr_t v_;
};

inline BigFloat from_rational(const Rational &q, mpfr_prec_t prec, mpfr_rnd_t rnd)
{
    BigFloat r(prec);
    mpfr_set_q(r.get(), q.get_mpq_t(), rnd);
    return r;
}

inline BigFloat from_dyadic(const DyadicRational &d, mpfr_prec_t prec, mpfr_rnd_t rnd)
{
    BigFloat r(prec);
    mpfr_set_z_2exp(r.get(), d.numerator().get_mpz_t(), -static_cast<mpfr_exp_t>(d.exponent()), rnd);
    return r;
}

inline std::string format(mpfr_srcptr x, int digits, char rnd)
{
    char *buf = nullptr;
    const std::string fmt = std::string("%.*R") + rnd + "e";
    if (mpfr_asprintf(&buf, fmt.c_str(), digits, x) < 0) {
        throw std::runtime_error("mpfr_asprintf failed");
    }
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
}

} // namespace detail

// Closed interval [lo, hi] with binary floating endpoints. Every operation
// rounds outward, so the exact real result always lies inside.
class Enclosure
{
public:
    Enclosure() : Enclosure(0L) {}

    explicit Enclosure(long v, mpfr_prec_t prec = kDefaultPrecision) : lo_(prec), hi_(prec)
    {
        mpfr_set_si(lo_.get(), v, MPFR_RNDD);
        mpfr_set_si(hi_.get(), v, MPFR_RNDU);
    }

    explicit Enclosure(const Rational &q, mpfr_prec_t prec = kDefaultPrecision)
        : lo_(detail::from_rational(q, prec, MPFR_RNDD)), hi_(detail::from_rational(q, prec, MPFR_RNDU))
    {
    }

    explicit Enclosure(const DyadicRational &d, mpfr_prec_t prec = kDefaultPrecision)
        : lo_(detail::from_dyadic(d, prec, MPFR_RNDD)), hi_(detail::from_dyadic(d, prec, MPFR_RNDU))
    {
    }

    static Enclosure from_bounds(const Rational &lo, const Rational &hi, mpfr_prec_t prec = kDefaultPrecision)
    {
        if (lo > hi) {
            throw std::invalid_argument("enclosure bounds out of order");
        }
        return Enclosure(detail::from_rational(lo, prec, MPFR_RNDD), detail::from_rational(hi, prec, MPFR_RNDU));
    }

    // Smallest enclosure containing both arguments.
    static Enclosure hull(const Enclosure &a, const Enclosure &b)
    {
        const auto p = std::max(a.prec(), b.prec());
        detail::BigFloat lo(p), hi(p);
        mpfr_min(lo.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_max(hi.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return Enclosure(std::move(lo), std::move(hi));
    }

    mpfr_prec_t prec() const noexcept
    {
        return std::max(lo_.prec(), hi_.prec());
    }

    mpfr_srcptr lo() const noexcept
    {
        return lo_.get();
    }
    mpfr_srcptr hi() const noexcept
    {
        return hi_.get();
    }

    Rational lo_rational() const
    {
        return lo_.to_rational();
    }
    Rational hi_rational() const
    {
        return hi_.to_rational();
    }
    Rational width() const
    {
        return hi_rational() - lo_rational();
    }

    // endpoints as doubles, still rounded outward
    double lo_double() const
    {
        return mpfr_get_d(lo_.get(), MPFR_RNDD);
    }
    double hi_double() const
    {
        return mpfr_get_d(hi_.get(), MPFR_RNDU);
    }
    double mid_double() const
    {
        detail::BigFloat m(prec() + 1);
        mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
        mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
        return mpfr_get_d(m.get(), MPFR_RNDN);
    }

    bool is_point() const
    {
        return mpfr_equal_p(lo_.get(), hi_.get()) != 0;
    }

    bool contains(const Rational &q) const
    {
        return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
    }
    bool contains(const Enclosure &o) const
    {
        return mpfr_lessequal_p(lo_.get(), o.lo_.get()) && mpfr_greaterequal_p(hi_.get(), o.hi_.get());
    }
    bool overlaps(const Enclosure &o) const
    {
        return mpfr_lessequal_p(lo_.get(), o.hi_.get()) && mpfr_lessequal_p(o.lo_.get(), hi_.get());
    }

    // Intersection; throws when empty, which would mean one of the
    // enclosures was not valid.
    Enclosure intersect(const Enclosure &o) const
    {
        if (!overlaps(o)) {
            throw std::logic_error("disjoint enclosures: " + to_string() + " and " + o.to_string());
        }
        const auto p = std::max(prec(), o.prec());
        detail::BigFloat lo(p), hi(p);
        mpfr_max(lo.get(), lo_.get(), o.lo_.get(), MPFR_RNDD);
        mpfr_min(hi.get(), hi_.get(), o.hi_.get(), MPFR_RNDU);
        return Enclosure(std::move(lo), std::move(hi));
    }

    Enclosure operator-() const
    {
        const auto p = prec();
        detail::BigFloat lo(p), hi(p);
        mpfr_neg(lo.get(), hi_.get(), MPFR_RNDD);
        mpfr_neg(hi.get(), lo_.get(), MPFR_RNDU);
        return Enclosure(std::move(lo), std::move(hi));
    }

    friend Enclosure operator+(const Enclosure &a, const Enclosure &b)
    {
        const auto p = std::max(a.prec(), b.prec());
        detail::BigFloat lo(p), hi(p);
        mpfr_add(lo.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_add(hi.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return Enclosure(std::move(lo), std::move(hi));
    }

    friend Enclosure operator-(const Enclosure &a, const Enclosure &b)
    {
        const auto p = std::max(a.prec(), b.prec());
        detail::BigFloat lo(p), hi(p);
        mpfr_sub(lo.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
        mpfr_sub(hi.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
        return Enclosure(std::move(lo), std::move(hi));
    }

    friend Enclosure operator*(const Enclosure &a, const Enclosure &b)
    {
        return combine(a, b, mpfr_mul);
    }

    friend Enclosure operator/(const Enclosure &a, const Enclosure &b)
    {
        if (mpfr_sgn(b.lo_.get()) <= 0 && mpfr_sgn(b.hi_.get()) >= 0) {
            throw std::domain_error("division by an enclosure containing zero: " + b.to_string());
        }
        return combine(a, b, mpfr_div);
    }

    friend Enclosure operator+(const Enclosure &a, const Rational &q)
    {
        return a + Enclosure(q, a.prec());
    }
    friend Enclosure operator+(const Rational &q, const Enclosure &a)
    {
        return Enclosure(q, a.prec()) + a;
    }
    friend Enclosure operator-(const Enclosure &a, const Rational &q)
    {
        return a - Enclosure(q, a.prec());
    }
    friend Enclosure operator-(const Rational &q, const Enclosure &a)
    {
        return Enclosure(q, a.prec()) - a;
    }
    friend Enclosure operator*(const Enclosure &a, const Rational &q)
    {
        return a * Enclosure(q, a.prec());
    }
    friend Enclosure operator*(const Rational &q, const Enclosure &a)
    {
        return Enclosure(q, a.prec()) * a;
    }
    friend Enclosure operator/(const Enclosure &a, const Rational &q)
    {
        return a / Enclosure(q, a.prec());
    }
    friend Enclosure operator/(const Rational &q, const Enclosure &a)
    {
        return Enclosure(q, a.prec()) / a;
    }

    Enclosure &operator+=(const Enclosure &o)
    {
        return *this = *this + o;
    }
    Enclosure &operator-=(const Enclosure &o)
    {
        return *this = *this - o;
    }
    Enclosure &operator*=(const Enclosure &o)
    {
        return *this = *this * o;
    }

    Enclosure abs() const
    {
        if (mpfr_sgn(lo_.get()) >= 0) {
            return *this;
        }
        if (mpfr_sgn(hi_.get()) <= 0) {
            return -*this;
        }
        const auto p = prec();
        detail::BigFloat lo(p), hi(p);
        mpfr_set_zero(lo.get(), 1);
        mpfr_neg(hi.get(), lo_.get(), MPFR_RNDU);
        mpfr_max(hi.get(), hi.get(), hi_.get(), MPFR_RNDU);
        return Enclosure(std::move(lo), std::move(hi));
    }

    // x^n for a non-negative integer n.
    Enclosure pow(unsigned long n) const
    {
        if (n == 0) {
            return Enclosure(1L, prec());
        }
        const auto p = prec();
        if (mpfr_sgn(lo_.get()) >= 0) {
            return monotone(mpfr_pow_ui, n);
        }
        if (mpfr_sgn(hi_.get()) <= 0) {
            const auto r = (-*this).monotone(mpfr_pow_ui, n);
            return n % 2 == 0 ? r : -r;
        }
        // straddles zero
        const auto m = abs();
        auto top = m.monotone(mpfr_pow_ui, n);
        if (n % 2 == 0) {
            detail::BigFloat lo(p);
            mpfr_set_zero(lo.get(), 1);
            return Enclosure(std::move(lo), detail::BigFloat(top.hi_));
        }
        detail::BigFloat lo(p), hi(p);
        detail::BigFloat nl(p);
        mpfr_neg(nl.get(), lo_.get(), MPFR_RNDU);
        mpfr_pow_ui(lo.get(), nl.get(), n, MPFR_RNDU);
        mpfr_neg(lo.get(), lo.get(), MPFR_RNDD);
        mpfr_pow_ui(hi.get(), hi_.get(), n, MPFR_RNDU);
        return Enclosure(std::move(lo), std::move(hi));
    }

    // x^r for a rational exponent r and x > 0.
    Enclosure pow(const Rational &r) const
    {
        if (mpfr_sgn(lo_.get()) <= 0) {
            throw std::domain_error("rational power of a non-positive enclosure: " + to_string());
        }
        const BigInt &num = r.get_num();
        const BigInt &den = r.get_den();
        if (!num.fits_slong_p() || !den.fits_ulong_p()) {
            throw std::domain_error("exponent too large: " + knopp::to_string(r));
        }
        const long p = num.get_si();
        const unsigned long q = den.get_ui();
        const auto prc = prec();
        // y -> y^(1/q) and y -> y^p (p >= 0) are increasing on y > 0; for p < 0
        // the second map is decreasing, so the endpoints swap.
        detail::BigFloat rlo(prc), rhi(prc);
        mpfr_rootn_ui(rlo.get(), lo_.get(), q, MPFR_RNDD);
        mpfr_rootn_ui(rhi.get(), hi_.get(), q, MPFR_RNDU);
        detail::BigFloat lo(prc), hi(prc);
        if (p >= 0) {
            mpfr_pow_si(lo.get(), rlo.get(), p, MPFR_RNDD);
            mpfr_pow_si(hi.get(), rhi.get(), p, MPFR_RNDU);
        } else {
            mpfr_pow_si(lo.get(), rhi.get(), p, MPFR_RNDD);
            mpfr_pow_si(hi.get(), rlo.get(), p, MPFR_RNDU);
        }
        return Enclosure(std::move(lo), std::move(hi));
    }

    std::string lo_string(int digits = 20) const
    {
        return detail::format(lo_.get(), digits, 'D');
    }
    std::string hi_string(int digits = 20) const
    {
        return detail::format(hi_.get(), digits, 'U');
    }
    std::string to_string(int digits = 20) const
    {
        return "[" + lo_string(digits) + ", " + hi_string(digits) + "]";
    }

    friend std::ostream &operator<<(std::ostream &os, const Enclosure &e)
    {
        return os << e.to_string();
    }

    friend Enclosure pow2(const Rational &r, mpfr_prec_t prec);

private:
    Enclosure(detail::BigFloat lo, detail::BigFloat hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}

    using BinaryOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
    using PowOp = int (*)(mpfr_ptr, mpfr_srcptr, unsigned long, mpfr_rnd_t);

    static Enclosure combine(const Enclosure &a, const Enclosure &b, BinaryOp op)
    {
        const auto p = std::max(a.prec(), b.prec());
        detail::BigFloat lo(p), hi(p), t(p);
        bool first = true;
        for (const auto *x : {&a.lo_, &a.hi_}) {
            for (const auto *y : {&b.lo_, &b.hi_}) {
                op(t.get(), x->get(), y->get(), MPFR_RNDD);
                if (first || mpfr_less_p(t.get(), lo.get())) {
                    mpfr_set(lo.get(), t.get(), MPFR_RNDD);
                }
                op(t.get(), x->get(), y->get(), MPFR_RNDU);
                if (first || mpfr_greater_p(t.get(), hi.get())) {
                    mpfr_set(hi.get(), t.get(), MPFR_RNDU);
                }
                first = false;
            }
        }
        return Enclosure(std::move(lo), std::move(hi));
    }

    Enclosure monotone(PowOp op, unsigned long n) const
    {
        const auto p = prec();
        detail::BigFloat lo(p), hi(p);
        op(lo.get(), lo_.get(), n, MPFR_RNDD);
        op(hi.get(), hi_.get(), n, MPFR_RNDU);
        return Enclosure(std::move(lo), std::move(hi));
    }

    detail::BigFloat lo_;
    detail::BigFloat hi_;
};

// 2^r for a rational exponent r. Exact when r is an integer.
inline Enclosure pow2(const Rational &r, mpfr_prec_t prec = kDefaultPrecision)
{
    const BigInt &num = r.get_num();
    const BigInt &den = r.get_den();
    if (!num.fits_slong_p() || !den.fits_ulong_p()) {
        throw std::domain_error("exponent too large: " + to_string(r));
    }
    detail::BigFloat base(prec);
    // 2^num is exact at any precision
    mpfr_set_ui_2exp(base.get(), 1, num.get_si(), MPFR_RNDN);
    if (den == 1) {
        return Enclosure(base, base);
    }
    detail::BigFloat lo(prec), hi(prec);
    mpfr_rootn_ui(lo.get(), base.get(), den.get_ui(), MPFR_RNDD);
    mpfr_rootn_ui(hi.get(), base.get(), den.get_ui(), MPFR_RNDU);
    return Enclosure(std::move(lo), std::move(hi));
}

// Three-way certified comparisons. "certainly" means for every pair of
// values inside the two enclosures.
inline bool certainly_le(const Enclosure &a, const Enclosure &b)
{
    return mpfr_lessequal_p(a.hi(), b.lo()) != 0;
}
inline bool certainly_lt(const Enclosure &a, const Enclosure &b)
{
    return mpfr_less_p(a.hi(), b.lo()) != 0;
}
inline bool certainly_ge(const Enclosure &a, const Enclosure &b)
{
    return certainly_le(b, a);
}
inline bool certainly_gt(const Enclosure &a, const Enclosure &b)
{
    return certainly_lt(b, a);
}
inline bool certainly_positive(const Enclosure &a)
{
    return mpfr_sgn(a.lo()) > 0;
}
inline bool certainly_negative(const Enclosure &a)
{
    return mpfr_sgn(a.hi()) < 0;
}

} // namespace knopp

#endif
