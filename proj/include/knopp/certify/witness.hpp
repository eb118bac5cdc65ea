#ifndef KNOPP_CERTIFY_WITNESS_HPP
#define KNOPP_CERTIFY_WITNESS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "../knopp_series.hpp"
#include "bounds.hpp"
#include "verdict.hpp"

namespace knopp
{

// t_m(x) = +2^{-2 nu m - 1} when 2^{2 nu m} x lies in (i, i + 1/2] for an
// integer i, and -2^{-2 nu m - 1} when it lies in (i + 1/2, i + 1].
inline DyadicRational step_tm(const SeriesParams &params, std::size_t m, const DyadicRational &x)
{
    const auto s = x.scaled(static_cast<long>(2 * params.nu() * m));
    // i = ceil(s) - 1, so s - i lies in (0, 1]
    const Rational sq = s.to_rational();
    const Rational frac = sq - Rational(ceil(sq) - 1);
    const auto h = shift_magnitude(params, m);
    return frac <= Rational(1, 2) ? h : -h;
}

struct WitnessReport {
    DyadicRational x;
    std::size_t m = 0;
    Rational beta;
    DyadicRational t_m;
    Enclosure quotient; // |K(x + t_m) - K(x)| / |t_m|^beta
    Enclosure bound;    // K(m, nu, alpha, beta)
    // quotient.lo >= bound.lo
    bool pass = false;
    // quotient.lo >= bound.hi
    bool strict = false;
    Verdict verdict = Verdict::Inconclusive;
    mpfr_prec_t precision = kDefaultPrecision;
};

// Quotient at the witness shift, from the exact finite difference: no
// truncation, only the rounding of lambda and of |t_m|^beta.
inline Enclosure witness_quotient_value(const SeriesParams &params, const DyadicRational &x, std::size_t m,
                                        const Rational &beta)
{
    const auto t = step_tm(params, m, x);
    const auto diff = exact_finite_difference(params, x, m, t.sign());
    const auto nu = static_cast<long>(params.nu());
    const Rational inv_scale = Rational(2 * nu * static_cast<long>(m) + 1) * beta; // |t_m|^-beta = 2^{this}
    return lambdapoly_eval(diff, params.lambda()).abs() * pow2(inv_scale, params.precision());
}

inline WitnessReport witness_quotient(const SeriesParams &params, const DyadicRational &x, std::size_t m,
                                      const Rational &beta, const ImprovabilityBound &bound)
{
    WitnessReport r;
    r.x = x;
    r.m = m;
    r.beta = beta;
    r.t_m = step_tm(params, m, x);
    r.quotient = witness_quotient_value(params, x, m, beta);
    r.bound = bound.value;
    r.pass = mpfr_greaterequal_p(r.quotient.lo(), r.bound.lo()) != 0;
    r.strict = certainly_ge(r.quotient, r.bound);
    r.verdict = certify_ge(r.quotient, r.bound);
    r.precision = params.precision();
    return r;
}

inline WitnessReport witness_quotient(const SeriesParams &params, const DyadicRational &x, std::size_t m,
                                      const Rational &beta)
{
    return witness_quotient(params, x, m, beta, improvability_bound(params, m, beta));
}

// Random dyadic points in (-1, 1] with `bits` fractional bits.
inline std::vector<DyadicRational> random_dyadic_points(std::size_t count, int bits, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const std::int64_t span = std::int64_t{1} << bits;
    std::uniform_int_distribution<std::int64_t> pick(-span + 1, span);
    std::vector<DyadicRational> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.emplace_back(BigInt(static_cast<long>(pick(rng))), static_cast<std::uint64_t>(bits));
    }
    return out;
}

struct WitnessSweep {
    SeriesParams params;
    Rational beta;
    std::vector<ImprovabilityBound> bounds; // index m
    std::vector<WitnessReport> items;
    std::size_t failures = 0;
    std::size_t inconclusive = 0;
    Verdict verdict = Verdict::Pass;
};

inline WitnessSweep witness_sweep(const SeriesParams &params, const Rational &beta,
                                  const std::vector<DyadicRational> &points, std::size_t m_max)
{
    WitnessSweep s{params, beta, {}, {}, 0, 0, Verdict::Pass};
    for (std::size_t m = 0; m <= m_max; ++m) {
        s.bounds.push_back(improvability_bound(params, m, beta));
    }
    for (const auto &x : points) {
        for (std::size_t m = 0; m <= m_max; ++m) {
            auto r = witness_quotient(params, x, m, beta, s.bounds[m]);
            if (r.verdict == Verdict::Fail) {
                ++s.failures;
            } else if (r.verdict == Verdict::Inconclusive) {
                ++s.inconclusive;
            }
            s.verdict = combine(s.verdict, r.verdict);
            s.items.push_back(std::move(r));
        }
    }
    return s;
}

// Finite-m surrogate of the divergence of the Hoelder quotients: the quotient
// dominates K(m, ...) for every m <= m_max, and consecutive bounds grow by
// exactly 2^{2 nu (beta - alpha)}.
struct TrendReport {
    SeriesParams params;
    DyadicRational x;
    Rational beta;
    Rational growth_log2;                 // 2 nu (beta - alpha)
    std::optional<Rational> growth_exact; // 2^{growth_log2} when rational
    std::vector<WitnessReport> steps;
    std::vector<ImprovabilityBound> bounds;
    // log2 scales step by exactly growth_log2 and the factor is shared
    bool ratio_exact = false;
    // every enclosure ratio bound(m+1)/bound(m) contains 2^{growth_log2}
    bool ratio_consistent = false;
    Verdict verdict = Verdict::Inconclusive;
};

inline TrendReport divergence_trend(const SeriesParams &params, const DyadicRational &x, const Rational &beta,
                                    std::size_t m_max)
{
    require_improvable(params, beta);
    TrendReport t{params, x, beta, improvability_growth_log2(params, beta), std::nullopt, {}, {},
                  true,   true, Verdict::Pass};
    if (is_integer(t.growth_log2)) {
        t.growth_exact = pow2_rational(t.growth_log2.get_num().get_si());
    }
    const Enclosure growth = pow2(t.growth_log2, params.precision());
    for (std::size_t m = 0; m <= m_max; ++m) {
        t.bounds.push_back(improvability_bound(params, m, beta));
        t.steps.push_back(witness_quotient(params, x, m, beta, t.bounds.back()));
        t.verdict = combine(t.verdict, t.steps.back().verdict);
        if (m == 0) {
            continue;
        }
        const auto &prev = t.bounds[m - 1];
        const auto &cur = t.bounds[m];
        if (cur.log2_scale - prev.log2_scale != t.growth_log2 || cur.factor_exact != prev.factor_exact) {
            t.ratio_exact = false;
        }
        if (t.growth_exact && cur.exact() && prev.exact() && *cur.exact() != *prev.exact() * *t.growth_exact) {
            t.ratio_exact = false;
        }
        if (!(cur.value / prev.value).overlaps(growth)) {
            t.ratio_consistent = false;
        }
    }
    if (!t.ratio_exact || !t.ratio_consistent) {
        t.verdict = Verdict::Fail;
    }
    return t;
}

} // namespace knopp

#endif
