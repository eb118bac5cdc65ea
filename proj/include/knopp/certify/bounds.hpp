#ifndef KNOPP_CERTIFY_BOUNDS_HPP
#define KNOPP_CERTIFY_BOUNDS_HPP

#include <cstddef>
#include <optional>

#include "../enclosure.hpp"
#include "../series_params.hpp"
#include "verdict.hpp"

namespace knopp
{

namespace detail
{

struct ExactPow2 {
    Rational operator()(const Rational &e) const
    {
        if (!is_integer(e)) {
            throw std::domain_error("2^e is irrational for e = " + knopp::to_string(e));
        }
        return pow2_rational(e.get_num().get_si());
    }
};

struct EnclosedPow2 {
    mpfr_prec_t prec;
    Enclosure operator()(const Rational &e) const
    {
        return pow2(e, prec);
    }
};

// 1 / (1 - 2^{-2 nu (1-alpha)}) + 2 / (2^{2 nu (alpha-1)} - 2^{-2 nu})
template <class T, class Pow2>
T holder_constant_formula(const SeriesParams &p, Pow2 pow2_of)
{
    const Rational nu(static_cast<long>(p.nu()));
    const T inv_growth = pow2_of(Rational(2 * nu * (p.alpha() - 1)));
    const T floor_term = pow2_of(Rational(-2 * nu));
    return T(Rational(1) / (Rational(1) - inv_growth)) + T(Rational(2) / (inv_growth - floor_term));
}

// (A - 2) / (A - 1) with A = 2^{2 nu (1 - alpha)}
template <class T, class Pow2>
T improvability_factor(const SeriesParams &p, Pow2 pow2_of)
{
    const Rational nu(static_cast<long>(p.nu()));
    const T a = pow2_of(Rational(2 * nu * (1 - p.alpha())));
    return T((a - Rational(2)) / (a - Rational(1)));
}

inline bool has_integer_exponents(const SeriesParams &p)
{
    return is_integer(p.lambda_log2());
}

} // namespace detail

// Hoelder constant C(alpha, nu) of |K(x) - K(y)| <= C |x - y|^alpha, |x - y| <= 2.
inline Enclosure holder_constant(const SeriesParams &params)
{
    auto c = detail::holder_constant_formula<Enclosure>(params, detail::EnclosedPow2{params.precision()});
    if (!certainly_positive(c)) {
        throw std::logic_error("holder_constant: non-positive result " + c.to_string());
    }
    return c;
}

// C(alpha, nu) as an exact rational when 2 alpha nu is an integer.
inline std::optional<Rational> holder_constant_exact(const SeriesParams &params)
{
    if (!detail::has_integer_exponents(params)) {
        return std::nullopt;
    }
    return detail::holder_constant_formula<Rational>(params, detail::ExactPow2{});
}

// K(m, nu, alpha, beta) = 2^{beta-1} (A-2)/(A-1) (2^{2 nu (beta-alpha)})^m, kept
// as factor * 2^{log2_scale} so the growth in m stays exact.
struct ImprovabilityBound {
    std::size_t m = 0;
    Rational beta;
    Enclosure factor;                    // (A-2)/(A-1)
    std::optional<Rational> factor_exact;
    Rational log2_scale;                 // beta - 1 + 2 nu (beta - alpha) m
    Enclosure value;

    std::optional<Rational> exact() const
    {
        if (!factor_exact || !is_integer(log2_scale)) {
            return std::nullopt;
        }
        return Rational(*factor_exact * pow2_rational(log2_scale.get_num().get_si()));
    }
};

inline void require_improvable(const SeriesParams &params, const Rational &beta)
{
    if (!params.improvable_regime()) {
        throw RegimeError("bound degenerate or non-positive: need 2 nu (1 - alpha) > 1, got " + params.to_string());
    }
    if (!(beta > params.alpha() && beta <= 1)) {
        throw RegimeError("beta must lie in (alpha, 1], got beta=" + to_string(beta));
    }
}

// log2 of the per-step growth 2^{2 nu (beta - alpha)}
inline Rational improvability_growth_log2(const SeriesParams &params, const Rational &beta)
{
    return Rational(2 * Rational(static_cast<long>(params.nu())) * (beta - params.alpha()));
}

inline ImprovabilityBound improvability_bound(const SeriesParams &params, std::size_t m, const Rational &beta)
{
    require_improvable(params, beta);
    ImprovabilityBound b;
    b.m = m;
    b.beta = beta;
    b.factor = detail::improvability_factor<Enclosure>(params, detail::EnclosedPow2{params.precision()});
    if (detail::has_integer_exponents(params)) {
        b.factor_exact = detail::improvability_factor<Rational>(params, detail::ExactPow2{});
    }
    b.log2_scale = beta - 1 + improvability_growth_log2(params, beta) * Rational(static_cast<long>(m));
    b.value = b.factor * pow2(b.log2_scale, params.precision());
    if (!certainly_positive(b.value)) {
        throw RegimeError("bound degenerate or non-positive: " + b.value.to_string());
    }
    return b;
}

// Sharper bound for beta = 1 before the last simplification:
// A^m - (A^m - 1) / (A - 1).
inline Enclosure intermediate_bound(const SeriesParams &params, std::size_t m)
{
    const Rational nu(static_cast<long>(params.nu()));
    const Enclosure a = pow2(Rational(2 * nu * (1 - params.alpha())), params.precision());
    const Enclosure am = a.pow(static_cast<unsigned long>(m));
    return am - (am - Rational(1)) / (a - Rational(1));
}

} // namespace knopp

#endif
