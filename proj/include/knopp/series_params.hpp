#ifndef KNOPP_SERIES_PARAMS_HPP
#define KNOPP_SERIES_PARAMS_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "dyadic.hpp"
#include "enclosure.hpp"

namespace knopp
{

// (alpha, nu) of K_{alpha,nu}(x) = sum_k lambda^k phi(2^{2 nu k} x) with
// lambda = 2^{-2 alpha nu}.
class SeriesParams
{
public:
    SeriesParams(Rational alpha, unsigned long nu, mpfr_prec_t precision = kDefaultPrecision)
        : alpha_(std::move(alpha)), nu_(nu), precision_(precision)
    {
        alpha_.canonicalize();
        if (!(alpha_ > 0 && alpha_ < 1)) {
            throw std::invalid_argument("alpha must lie in (0,1), got " + knopp::to_string(alpha_));
        }
        if (nu_ < 1) {
            throw std::invalid_argument("nu must be a positive integer");
        }
        if (precision_ < 2) {
            throw std::invalid_argument("precision must be at least 2 bits");
        }
        lambda_ = pow2(lambda_log2(), precision_);
    }

    const Rational &alpha() const noexcept
    {
        return alpha_;
    }
    unsigned long nu() const noexcept
    {
        return nu_;
    }
    mpfr_prec_t precision() const noexcept
    {
        return precision_;
    }

    // log2(lambda) = -2 alpha nu
    Rational lambda_log2() const
    {
        return Rational(-2 * alpha_ * Rational(nu_));
    }

    const Enclosure &lambda() const noexcept
    {
        return lambda_;
    }

    // lambda as an exact rational when 2 alpha nu is an integer
    std::optional<Rational> lambda_exact() const
    {
        const auto e = lambda_log2();
        if (!is_integer(e)) {
            return std::nullopt;
        }
        return pow2_rational(e.get_num().get_si());
    }

    // 2 nu (1 - alpha) > 1, i.e. 2 nu > 1 / (1 - alpha)
    bool improvable_regime() const
    {
        return 2 * Rational(nu_) * (1 - alpha_) > 1;
    }

    // Same parameters at another working precision.
    SeriesParams with_precision(mpfr_prec_t precision) const
    {
        return SeriesParams(alpha_, nu_, precision);
    }

    std::string to_string() const
    {
        return "alpha=" + knopp::to_string(alpha_) + " nu=" + std::to_string(nu_);
    }

private:
    Rational alpha_;
    unsigned long nu_;
    mpfr_prec_t precision_;
    Enclosure lambda_;
};

// 2^{-2 alpha nu} at the requested precision; relative width <= 2^{1-precision}.
inline Enclosure lambda_enclosure(const SeriesParams &params, mpfr_prec_t precision)
{
    if (precision < 2) {
        throw std::invalid_argument("precision must be at least 2 bits");
    }
    return pow2(params.lambda_log2(), precision);
}

} // namespace knopp

#endif
