#ifndef KNOPP_KNOPP_SERIES_HPP
#define KNOPP_KNOPP_SERIES_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "enclosure.hpp"
#include "lambda_poly.hpp"
#include "sawtooth.hpp"
#include "series_params.hpp"

namespace knopp
{

inline constexpr std::size_t kDefaultTermCap = 1'000'000;

struct EvalOptions {
    std::size_t term_cap = kDefaultTermCap;
};

// The requested accuracy needs more terms than the configured cap allows.
class PrecisionUnattainable : public std::runtime_error
{
public:
    PrecisionUnattainable(const std::string &what, Enclosure achievable_width)
        : std::runtime_error(what), achievable_width_(std::move(achievable_width))
    {
    }

    // width the capped evaluation can still guarantee
    const Enclosure &achievable_width() const noexcept
    {
        return achievable_width_;
    }

private:
    Enclosure achievable_width_;
};

struct EvalResult {
    Enclosure value;
    // number of series terms summed exactly (k = 0 .. terms_used-1)
    std::size_t terms_used = 0;
    // bound on the neglected remainder; exactly zero when every omitted term vanishes
    Enclosure tail_bound;
};

namespace detail
{

// scale * base^(n+1) / (1 - base) for 0 < base < 1
inline Enclosure geometric_tail(const Enclosure &base, const Rational &scale, std::size_t n)
{
    return scale * base.pow(static_cast<unsigned long>(n + 1)) / (Rational(1) - base);
}

// Smallest n with scale * base^(n+1) / (1 - base) <= tol, or nullopt when n
// would exceed cap.
inline std::optional<std::size_t> terms_for_tail(const Enclosure &base, const Rational &scale, const Rational &tol,
                                                 std::size_t cap)
{
    const Enclosure tol_e(tol, base.prec());
    auto ok = [&](std::size_t n) { return certainly_le(geometric_tail(base, scale, n), tol_e); };

    // log-space estimate, then walk to the exact minimum
    BigFloat lt(64), lb(64), lo(64), ls(64);
    mpfr_set_q(lt.get(), tol.get_mpq_t(), MPFR_RNDN);
    mpfr_log2(lt.get(), lt.get(), MPFR_RNDN);
    mpfr_log2(lb.get(), base.hi(), MPFR_RNDN);
    mpfr_set_ui(lo.get(), 1, MPFR_RNDN);
    mpfr_sub(lo.get(), lo.get(), base.hi(), MPFR_RNDN);
    mpfr_log2(lo.get(), lo.get(), MPFR_RNDN);
    mpfr_set_q(ls.get(), scale.get_mpq_t(), MPFR_RNDN);
    mpfr_log2(ls.get(), ls.get(), MPFR_RNDN);
    const double est = (mpfr_get_d(lt.get(), MPFR_RNDN) + mpfr_get_d(lo.get(), MPFR_RNDN) -
                        mpfr_get_d(ls.get(), MPFR_RNDN)) /
                           mpfr_get_d(lb.get(), MPFR_RNDN) -
                       1.0;
    if (!std::isfinite(est) || est > static_cast<double>(cap) + 2.0) {
        return std::nullopt;
    }
    std::size_t n = est <= 0 ? 0 : static_cast<std::size_t>(est);
    while (!ok(n)) {
        if (++n > cap) {
            return std::nullopt;
        }
    }
    while (n > 0 && ok(n - 1)) {
        --n;
    }
    return n;
}

// Index of the last term that can be nonzero at a reduced dyadic point n/2^e:
// for 2 nu k > e the argument 2^{2 nu k} x is an even integer.
inline std::uint64_t last_active_term(const SeriesParams &params, const DyadicRational &reduced)
{
    return reduced.exponent() / (2 * params.nu());
}

// Smallest k with 2^{2 nu k} x an integer.
inline std::uint64_t first_integral_term(const SeriesParams &params, const DyadicRational &x)
{
    const auto step = 2 * params.nu();
    return (x.exponent() + step - 1) / step;
}

} // namespace detail

// Representative of x modulo the period 2, in (-1, 1].
inline DyadicRational eval_K_periodic_reduce(const SeriesParams & /*params*/, const DyadicRational &x)
{
    return reduce_mod2(x);
}

// Exact lambda-polynomial of the partial sum sum_{k < n_terms} lambda^k phi(2^{2 nu k} x).
// With n_terms unset the full series is returned; at a dyadic point it is finite.
inline LambdaPoly knopp_poly(const SeriesParams &params, const DyadicRational &x,
                             std::optional<std::size_t> n_terms = std::nullopt)
{
    const auto reduced = reduce_mod2(x);
    std::uint64_t last = detail::last_active_term(params, reduced);
    if (n_terms) {
        if (*n_terms == 0) {
            return {};
        }
        last = std::min<std::uint64_t>(last, *n_terms - 1);
    }
    std::vector<Rational> c(static_cast<std::size_t>(last) + 1);
    const long step = static_cast<long>(2 * params.nu());
    for (std::uint64_t k = 0; k <= last; ++k) {
        c[k] = sawtooth(reduced.scaled(step * static_cast<long>(k))).to_rational();
    }
    return LambdaPoly(std::move(c));
}

// Certified enclosure of K_{alpha,nu}(x) of width at most eps (plus rounding).
inline EvalResult eval_K(const SeriesParams &params, const DyadicRational &x, const Rational &eps,
                         const EvalOptions &opts = {})
{
    if (!(eps > 0)) {
        throw std::invalid_argument("eval_K: eps must be positive");
    }
    const auto &lambda = params.lambda();
    const auto reduced = reduce_mod2(x);
    const auto last = detail::last_active_term(params, reduced);
    const auto needed = detail::terms_for_tail(lambda, Rational(1), Rational(eps / 2), opts.term_cap);

    const Enclosure upper = Rational(1) / (Rational(1) - lambda);
    const Enclosure range = Enclosure::hull(Enclosure(0L, lambda.prec()), upper);

    EvalResult res;
    if (!needed || *needed >= last) {
        if (last > opts.term_cap) {
            throw PrecisionUnattainable("eval_K: tolerance needs more than " + std::to_string(opts.term_cap) +
                                            " terms",
                                        detail::geometric_tail(lambda, Rational(1), opts.term_cap));
        }
        // every omitted term is exactly zero
        res.terms_used = static_cast<std::size_t>(last) + 1;
        res.value = lambdapoly_eval(knopp_poly(params, reduced), lambda).intersect(range);
        res.tail_bound = Enclosure(0L, lambda.prec());
        return res;
    }
    const std::size_t n = *needed;
    res.terms_used = n + 1;
    res.tail_bound = detail::geometric_tail(lambda, Rational(1), n);
    const auto partial = lambdapoly_eval(knopp_poly(params, reduced, n + 1), lambda);
    // omitted terms are non-negative
    res.value = (partial + Enclosure::hull(Enclosure(0L, lambda.prec()), res.tail_bound)).intersect(range);
    return res;
}

// Enclosure of the fixed-length partial sum sum_{k < n_terms}; no tail term.
inline Enclosure eval_K_partial(const SeriesParams &params, const DyadicRational &x, std::size_t n_terms)
{
    return lambdapoly_eval(knopp_poly(params, x, n_terms), params.lambda());
}

// |t_m| = 2^{-2 nu m - 1}
inline DyadicRational shift_magnitude(const SeriesParams &params, std::size_t m)
{
    return DyadicRational::pow2(-static_cast<long>(2 * params.nu() * m + 1));
}

// Exact K(x + sign 2^{-2 nu m - 1}) - K(x). For k > m the shifted argument
// moves by an even integer, so those terms cancel and the sum stops at k = m.
inline LambdaPoly exact_finite_difference(const SeriesParams &params, const DyadicRational &x, std::size_t m,
                                          int sign)
{
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("exact_finite_difference: sign must be +1 or -1");
    }
    const auto h = shift_magnitude(params, m);
    const auto y = sign > 0 ? x + h : x - h;
    const long step = static_cast<long>(2 * params.nu());
    std::vector<Rational> c(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        const long s = step * static_cast<long>(k);
        c[k] = (sawtooth(y.scaled(s)) - sawtooth(x.scaled(s))).to_rational();
    }
    return LambdaPoly(std::move(c));
}

// Certified enclosure of F(x) = int_0^x K_{alpha,nu}, summed termwise with the
// closed-form sawtooth primitive Phi: term k is lambda^k 2^{-2 nu k} Phi(2^{2 nu k} x).
// Writing Phi(t) = t/2 + g(t) with |g| <= 1/8 splits every tail into an exact
// geometric part and a remainder bounded with mu = lambda 2^{-2 nu}.
inline EvalResult antiderivative_K(const SeriesParams &params, const DyadicRational &x, const Rational &eps,
                                   const EvalOptions &opts = {})
{
    if (!(eps > 0)) {
        throw std::invalid_argument("antiderivative_K: eps must be positive");
    }
    const auto &lambda = params.lambda();
    const long step = static_cast<long>(2 * params.nu());
    const Enclosure mu = lambda * pow2_rational(-step);
    const auto &dev = sawtooth_primitive_deviation();
    // g vanishes at integers, so from this index on each term is exactly lambda^k x/2
    const auto first_int = detail::first_integral_term(params, x);
    const auto needed = detail::terms_for_tail(mu, dev, Rational(eps / 2), opts.term_cap);

    std::size_t n_exact; // terms k < n_exact are summed with Phi
    EvalResult res;
    if (!needed || *needed + 1 >= first_int) {
        if (first_int > opts.term_cap) {
            throw PrecisionUnattainable("antiderivative_K: tolerance needs more than " +
                                            std::to_string(opts.term_cap) + " terms",
                                        detail::geometric_tail(mu, Rational(2 * dev), opts.term_cap));
        }
        n_exact = static_cast<std::size_t>(first_int);
        res.tail_bound = Enclosure(0L, lambda.prec());
    } else {
        n_exact = *needed + 1;
        res.tail_bound = detail::geometric_tail(mu, dev, *needed);
    }
    res.terms_used = n_exact;

    const Rational xq = x.to_rational();
    LambdaPoly poly;
    for (std::size_t k = 0; k < n_exact; ++k) {
        const long s = step * static_cast<long>(k);
        const Rational t = x.scaled(s).to_rational();
        poly.add_term(Rational(sawtooth_primitive(t) * pow2_rational(-s)), k);
    }
    Enclosure value = lambdapoly_eval(poly, lambda);
    // (x/2) sum_{k >= n_exact} lambda^k
    if (xq != 0) {
        const Enclosure linear_tail =
            n_exact == 0 ? Rational(1) / (Rational(1) - lambda)
                         : detail::geometric_tail(lambda, Rational(1), n_exact - 1);
        value += linear_tail * Rational(xq / 2);
    }
    if (!(res.tail_bound.hi_rational() == 0)) {
        value += Enclosure::hull(-res.tail_bound, res.tail_bound);
    }
    res.value = value;
    return res;
}

struct SamplePoint {
    DyadicRational x;
    Enclosure value;
};

// Fixed-term partial sums on a dyadic grid, for plotting.
struct SampleSeries {
    SeriesParams params;
    std::vector<SamplePoint> points;
    std::size_t terms_used = 0;
};

// n_points samples from a to b inclusive. Grid points are the equispaced
// abscissae rounded to a common dyadic resolution fine enough to keep them
// strictly increasing; the end points are hit exactly.
inline SampleSeries sample_K(const SeriesParams &params, const DyadicRational &a, const DyadicRational &b,
                             std::size_t n_points, std::size_t n_terms)
{
    if (n_points < 2) {
        throw std::invalid_argument("sample_K: need at least 2 points");
    }
    if (n_terms < 1) {
        throw std::invalid_argument("sample_K: need at least 1 term");
    }
    if (!(a < b)) {
        throw std::invalid_argument("sample_K: empty interval");
    }
    const Rational aq = a.to_rational();
    const Rational span = b.to_rational() - aq;
    const Rational step = span / Rational(static_cast<long>(n_points - 1));
    // resolution: 2^-res with 2^-res <= step / 2^8
    long res = static_cast<long>(std::max(a.exponent(), b.exponent()));
    while (pow2_rational(-res) * 256 > step) {
        ++res;
    }
    const Rational unit = pow2_rational(-res);

    SampleSeries out{params, {}, n_terms};
    out.points.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const Rational target = aq + step * Rational(static_cast<long>(i));
        const BigInt ticks = floor(Rational(target / unit + Rational(1, 2)));
        DyadicRational x(ticks, static_cast<std::uint64_t>(res));
        auto value = eval_K_partial(params, x, n_terms);
        out.points.push_back({std::move(x), std::move(value)});
    }
    return out;
}

// CSV with columns x_num, x_exp, value_lo, value_hi. Lines of `header`
// are emitted first, each prefixed with "# ".
inline void write_csv(std::ostream &os, const SampleSeries &s, const std::vector<std::string> &header = {})
{
    for (const auto &h : header) {
        os << "# " << h << '\n';
    }
    os << "x_num,x_exp,value_lo,value_hi\n";
    for (const auto &p : s.points) {
        os << p.x.numerator().get_str(10) << ',' << p.x.exponent() << ',' << p.value.lo_string(17) << ','
           << p.value.hi_string(17) << '\n';
    }
}

// Plain double-precision evaluation for the PDE builders. Not certified.
// Once 4^{nu k} t is an integer every later term vanishes.
inline double knopp_double(double lambda, unsigned long nu, double t)
{
    const double scale = std::ldexp(1.0, static_cast<int>(2 * nu));
    double sum = 0.0;
    double weight = 1.0;
    double arg = t;
    for (int k = 0; k < 2000 && weight > 1e-20; ++k) {
        sum += weight * std::fabs(std::remainder(arg, 2.0));
        if (arg == std::floor(arg) || !std::isfinite(arg)) {
            break;
        }
        weight *= lambda;
        arg *= scale;
    }
    return sum;
}

inline double knopp_double(const SeriesParams &params, double t)
{
    return knopp_double(params.lambda().mid_double(), params.nu(), t);
}

// Double-precision F(t) = int_0^t K_{alpha,nu}.
inline double knopp_primitive_double(double lambda, unsigned long nu, double t)
{
    const int step = static_cast<int>(2 * nu);
    auto primitive = [](double s) {
        const double n = std::floor(s / 2.0);
        const double r = s - 2.0 * n;
        return n + (r <= 1.0 ? 0.5 * r * r : 2.0 * r - 0.5 * r * r - 1.0);
    };
    double sum = 0.0;
    double weight = 1.0;
    for (int k = 0; k < 2000; ++k) {
        const double arg = std::ldexp(t, step * k);
        if (arg == std::floor(arg) || weight < 1e-20) {
            // remaining terms are lambda^j t/2
            sum += weight * 0.5 * t / (1.0 - lambda);
            break;
        }
        sum += weight * std::ldexp(primitive(arg), -step * k);
        weight *= lambda;
    }
    return sum;
}

inline double knopp_primitive_double(const SeriesParams &params, double t)
{
    return knopp_primitive_double(params.lambda().mid_double(), params.nu(), t);
}

} // namespace knopp

#endif
