#ifndef KNOPP_SAWTOOTH_HPP
#define KNOPP_SAWTOOTH_HPP

#include <stdexcept>

#include "dyadic.hpp"
#include "enclosure.hpp"

namespace knopp
{

// Representative of x modulo 2 in (-1, 1].
inline Rational reduce_mod2(const Rational &x)
{
    // i = ceil((x - 1) / 2) is the unique integer with x - 2i in (-1, 1]
    const BigInt i = ceil(Rational((x - 1) / 2));
    return Rational(x - 2 * Rational(i));
}

inline DyadicRational reduce_mod2(const DyadicRational &x)
{
    // n/2^e: work on the numerator modulo 2^(e+1)
    const auto e = x.exponent();
    BigInt period(1);
    mpz_mul_2exp(period.get_mpz_t(), period.get_mpz_t(), static_cast<mp_bitcnt_t>(e + 1));
    BigInt half(1);
    mpz_mul_2exp(half.get_mpz_t(), half.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), x.numerator().get_mpz_t(), period.get_mpz_t()); // r in [0, 2^(e+1))
    if (r > half) {
        r -= period;
    }
    return DyadicRational(r, e);
}

// The 2-periodic tent: |x| on [-1, 1], extended with period 2.
inline Rational sawtooth(const Rational &x)
{
    return abs(reduce_mod2(x));
}

inline DyadicRational sawtooth(const DyadicRational &x)
{
    return reduce_mod2(x).abs();
}

// Slope of the sawtooth at a point that is not an integer: +1 on (2i, 2i+1),
// -1 on (2i-1, 2i).
inline int sawtooth_slope(const Rational &x)
{
    const auto r = reduce_mod2(x);
    if (is_integer(r)) {
        throw std::domain_error("sawtooth slope requested at an integer");
    }
    return sgn(r);
}

// Primitive of the sawtooth with value 0 at 0: t^2/2 on [0, 1],
// 2t - t^2/2 - 1 on [1, 2], and shifted by +1 per period.
inline Rational sawtooth_primitive(const Rational &t)
{
    const BigInt n = floor(Rational(t / 2));
    const Rational r = t - 2 * Rational(n); // r in [0, 2)
    Rational inner = r <= 1 ? Rational(r * r / 2) : Rational(2 * r - r * r / 2 - 1);
    return Rational(n) + inner;
}

// sup over t of |sawtooth_primitive(t) - t/2|, attained at t = 1/2 + integer.
inline const Rational &sawtooth_primitive_deviation()
{
    static const Rational bound(1, 8);
    return bound;
}

// Range of the sawtooth over an enclosure of width < 2. The input is split at
// the integer breakpoints it covers, so the result is the exact image of the
// interval [lo, hi] and is never wider than the input.
inline Enclosure sawtooth_enclosure(const Enclosure &x)
{
    if (!(x.width() < 2)) {
        throw std::invalid_argument("sawtooth_enclosure needs width < 2, got " + x.to_string());
    }
    const Rational lo = x.lo_rational();
    const Rational hi = x.hi_rational();
    Rational vmin = sawtooth(lo);
    Rational vmax = vmin;
    auto visit = [&](const Rational &v) {
        if (v < vmin) {
            vmin = v;
        }
        if (v > vmax) {
            vmax = v;
        }
    };
    visit(sawtooth(hi));
    // at most two integers fit strictly inside an interval shorter than 2
    for (BigInt k = ceil(lo); Rational(k) <= hi; ++k) {
        visit(Rational(mpz_odd_p(k.get_mpz_t()) ? 1 : 0));
    }
    return Enclosure::from_bounds(vmin, vmax, x.prec());
}

} // namespace knopp

#endif
