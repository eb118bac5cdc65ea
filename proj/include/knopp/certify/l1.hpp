#ifndef KNOPP_CERTIFY_L1_HPP
#define KNOPP_CERTIFY_L1_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bounds.hpp"
#include "integrand.hpp"
#include "verdict.hpp"

namespace knopp
{

inline constexpr int kDefaultRefinementDepth = 8;

// Enclosure of an integral of |f| together with bookkeeping on how it was
// obtained.
struct AbsIntegral {
    Enclosure value;
    std::size_t cells = 0;
    // cells where the sign stayed undecided down to the refinement cap and
    // only |int f| <= int |f| <= w (|f(a)| + |f(b)|) / 2 was used
    std::size_t uncertain_cells = 0;
};

namespace detail
{

// exact int_a^b |f| for affine f with end values fa, fb over a width w
inline Rational abs_affine_integral(const Rational &fa, const Rational &fb, const Rational &w)
{
    if (sgn(fa) * sgn(fb) >= 0) {
        return Rational(w * abs(fa + fb) / 2);
    }
    return Rational(w * (fa * fa + fb * fb) / (2 * (abs(fa) + abs(fb))));
}

struct CellIntegrator {
    const Enclosure &slope;
    const Enclosure &intercept;
    int depth_cap;
    std::size_t uncertain = 0;

    Enclosure at(const Rational &u) const
    {
        return slope * u + intercept;
    }

    Enclosure integrate(const Rational &a, const Rational &b, int depth)
    {
        const Rational w = b - a;
        const Enclosure fa = at(a);
        const Enclosure fb = at(b);
        const bool a_pos = certainly_positive(fa) || (mpfr_sgn(fa.lo()) >= 0);
        const bool a_neg = certainly_negative(fa) || (mpfr_sgn(fa.hi()) <= 0);
        const bool b_pos = certainly_positive(fb) || (mpfr_sgn(fb.lo()) >= 0);
        const bool b_neg = certainly_negative(fb) || (mpfr_sgn(fb.hi()) <= 0);
        if ((a_pos && b_pos) || (a_neg && b_neg)) {
            return (fa + fb).abs() * Rational(w / 2);
        }
        if ((a_pos && b_neg) || (a_neg && b_pos)) {
            const Enclosure num = fa * fa + fb * fb;
            const Enclosure den = (fa.abs() + fb.abs()) * Rational(2);
            if (certainly_positive(den)) {
                return num / den * w;
            }
        }
        if (depth < depth_cap) {
            const Rational mid = (a + b) / 2;
            return integrate(a, mid, depth + 1) + integrate(mid, b, depth + 1);
        }
        ++uncertain;
        const Enclosure lower = (fa + fb).abs() * Rational(w / 2);
        const Enclosure upper = (fa.abs() + fb.abs()) * Rational(w / 2);
        return Enclosure::hull(Enclosure(lower.lo_rational(), lower.prec()), Enclosure(upper.hi_rational(), upper.prec()));
    }
};

} // namespace detail

// Enclosure of int_a^b |f| for -1 <= a <= b <= 1 (inside the integrand's
// period window). With an exact lambda everything is rational and exact.
inline AbsIntegral abs_integral(const PiecewiseAffineLambda &f, const SeriesParams &params, const Rational &a,
                                const Rational &b, int depth_cap = kDefaultRefinementDepth)
{
    const Rational left = f.left().to_rational();
    const Rational right = f.right().to_rational();
    if (a < left || b > right || a > b) {
        throw std::invalid_argument("abs_integral: window outside the integrand's range");
    }
    const auto prec = params.precision();
    AbsIntegral out{Enclosure(0L, prec), 0, 0};
    if (a == b) {
        return out;
    }
    const auto lambda_q = params.lambda_exact();
    Rational exact_sum(0);
    Enclosure sum(0L, prec);
    const auto &bp = f.breakpoints();
    for (std::size_t j = 0; j < f.cells(); ++j) {
        const Rational c0 = bp[j].to_rational();
        const Rational c1 = bp[j + 1].to_rational();
        if (c1 <= a || c0 >= b) {
            continue;
        }
        const Rational u0 = c0 < a ? a : c0;
        const Rational u1 = c1 > b ? b : c1;
        ++out.cells;
        if (lambda_q) {
            const Rational s = f.slope(j).evaluate(*lambda_q);
            const Rational i = f.intercept(j).evaluate(*lambda_q);
            exact_sum += detail::abs_affine_integral(s * u0 + i, s * u1 + i, u1 - u0);
        } else {
            const Enclosure s = lambdapoly_eval(f.slope(j), params.lambda());
            const Enclosure i = lambdapoly_eval(f.intercept(j), params.lambda());
            detail::CellIntegrator cell{s, i, depth_cap};
            sum += cell.integrate(u0, u1, 0);
            out.uncertain_cells += cell.uncertain;
        }
    }
    out.value = lambda_q ? Enclosure(exact_sum, prec) : sum;
    return out;
}

// Mean of |(K(x + h) - K(x)) / h| over [-M, M], h = 2^{-2 nu m - 1}, using
// 2-periodicity: floor(M) full periods plus a remainder folded into (-1, 1].
inline AbsIntegral forward_quotient_mean(const SeriesParams &params, std::size_t m, const DyadicRational &half_window,
                                         int depth_cap = kDefaultRefinementDepth)
{
    if (half_window < DyadicRational(1)) {
        throw std::invalid_argument("forward_quotient_mean: M must be at least 1");
    }
    const auto f = build_integrand(params, m, ShiftRule::Forward);
    const Rational M = half_window.to_rational();
    const BigInt periods = floor(M);

    auto period = abs_integral(f, params, Rational(-1), Rational(1), depth_cap);
    AbsIntegral total{period.value * Rational(periods), period.cells, period.uncertain_cells};

    const Rational rest = 2 * (M - Rational(periods));
    if (rest > 0) {
        const Rational start = reduce_mod2(Rational(-M + 2 * Rational(periods)));
        std::vector<std::pair<Rational, Rational>> pieces;
        if (start + rest <= 1) {
            pieces.emplace_back(start, start + rest);
        } else {
            pieces.emplace_back(start, Rational(1));
            pieces.emplace_back(Rational(-1), Rational(start + rest - 2));
        }
        for (const auto &[a, b] : pieces) {
            auto part = abs_integral(f, params, a, b, depth_cap);
            total.value += part.value;
            total.cells += part.cells;
            total.uncertain_cells += part.uncertain_cells;
        }
    }
    total.value = total.value / Rational(2 * M);
    return total;
}

struct L1Report {
    SeriesParams params;
    std::size_t m = 0;
    DyadicRational M;
    Enclosure integral;       // enclosure of (1/2M) int_{-M}^{M} |(K(x+h) - K(x))/h| dx
    Enclosure integral_lower; // its certified lower end, as a point enclosure
    Enclosure target;         // K(m, nu, alpha, 1) / 4
    std::size_t cells = 0;
    std::size_t uncertain_cells = 0;
    bool pass = false;
    Verdict verdict = Verdict::Inconclusive;
};

// Certified check of the L^1 lower bound on forward difference quotients.
// Inconclusive means the enclosure straddles the target: retry at a higher
// precision rather than read it as a failure.
inline L1Report l1_lower_bound_check(const SeriesParams &params, std::size_t m, const DyadicRational &half_window,
                                     int depth_cap = kDefaultRefinementDepth)
{
    require_improvable(params, Rational(1));
    const auto mean = forward_quotient_mean(params, m, half_window, depth_cap);
    L1Report r{params, m, half_window, mean.value, Enclosure(mean.value.lo_rational(), params.precision()),
               improvability_bound(params, m, Rational(1)).value * Rational(1, 4), mean.cells, mean.uncertain_cells,
               false, Verdict::Inconclusive};
    r.verdict = certify_ge(r.integral, r.target);
    r.pass = r.verdict == Verdict::Pass;
    return r;
}

} // namespace knopp

#endif
