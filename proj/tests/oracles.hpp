#ifndef KNOPP_TESTS_ORACLES_HPP
#define KNOPP_TESTS_ORACLES_HPP

// Reference computations that avoid the library's own shortcuts: plain
// rational arithmetic, direct truncated sums and high-precision MPFR.

#include <cstddef>
#include <random>
#include <string>

#include <gmpxx.h>
#include <mpfr.h>

namespace oracle
{

// |x - 2 round(x/2)| computed from scratch with mpq floor.
inline mpq_class tent(const mpq_class &x)
{
    mpq_class half = x / 2;
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), half.get_num_mpz_t(), half.get_den_mpz_t());
    mpq_class r = x - 2 * mpq_class(f); // r in [0, 2)
    if (r > 1) {
        r = 2 - r;
    }
    return r;
}

inline mpq_class pow2q(long e)
{
    mpz_class p = 1;
    if (e >= 0) {
        p <<= static_cast<mp_bitcnt_t>(e);
        return mpq_class(p);
    }
    p <<= static_cast<mp_bitcnt_t>(-e);
    return mpq_class(1, 1) / mpq_class(p);
}

// sum_{k < terms} lambda^k phi(2^{2 nu k} x) with rational lambda.
inline mpq_class brute_sum(const mpq_class &lambda, unsigned long nu, const mpq_class &x, std::size_t terms)
{
    mpq_class total = 0, lk = 1, arg = x;
    const mpq_class scale = pow2q(static_cast<long>(2 * nu));
    for (std::size_t k = 0; k < terms; ++k) {
        total += lk * tent(arg);
        lk *= lambda;
        arg *= scale;
    }
    return total;
}

// 2^e for rational e at the given precision, rounded to nearest.
inline double exp2_high(const mpq_class &e, mpfr_prec_t prec = 256)
{
    mpfr_t v;
    mpfr_init2(v, prec);
    mpfr_set_q(v, e.get_mpq_t(), MPFR_RNDN);
    mpfr_exp2(v, v, MPFR_RNDN);
    const double d = mpfr_get_d(v, MPFR_RNDN);
    mpfr_clear(v);
    return d;
}

inline mpq_class random_rational(std::mt19937_64 &rng, long range = 1000, long den_max = 997)
{
    std::uniform_int_distribution<long> num(-range * den_max, range * den_max);
    std::uniform_int_distribution<long> den(1, den_max);
    mpq_class q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

} // namespace oracle

#endif
