#ifndef KNOPP_CERTIFY_INTEGRAND_HPP
#define KNOPP_CERTIFY_INTEGRAND_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "../knopp_series.hpp"
#include "witness.hpp"

namespace knopp
{

// Which shift the difference quotient (K(x + t) - K(x)) / t uses.
enum class ShiftRule {
    Adaptive, // t = t_m(x)
    Forward,  // t = +2^{-2 nu m - 1}
    Backward, // t = -2^{-2 nu m - 1}
};

// Piecewise affine function of x on (b_0, b_n], cells (b_j, b_{j+1}], with
// slope and intercept given as lambda-polynomials: f(x) = slope_j x + intercept_j.
class PiecewiseAffineLambda
{
public:
    PiecewiseAffineLambda(std::vector<DyadicRational> breakpoints, std::vector<LambdaPoly> slopes,
                          std::vector<LambdaPoly> intercepts)
        : bp_(std::move(breakpoints)), slope_(std::move(slopes)), intercept_(std::move(intercepts))
    {
        if (bp_.size() < 2 || slope_.size() + 1 != bp_.size() || intercept_.size() != slope_.size()) {
            throw std::invalid_argument("PiecewiseAffineLambda: inconsistent cell data");
        }
        for (std::size_t j = 1; j < bp_.size(); ++j) {
            if (!(bp_[j - 1] < bp_[j])) {
                throw std::invalid_argument("PiecewiseAffineLambda: breakpoints must increase");
            }
        }
    }

    std::size_t cells() const noexcept
    {
        return slope_.size();
    }
    const std::vector<DyadicRational> &breakpoints() const noexcept
    {
        return bp_;
    }
    const LambdaPoly &slope(std::size_t j) const
    {
        return slope_.at(j);
    }
    const LambdaPoly &intercept(std::size_t j) const
    {
        return intercept_.at(j);
    }
    const DyadicRational &left() const
    {
        return bp_.front();
    }
    const DyadicRational &right() const
    {
        return bp_.back();
    }

    // index of the cell (b_j, b_{j+1}] containing x
    std::size_t cell_of(const DyadicRational &x) const
    {
        if (!(x > bp_.front() && x <= bp_.back())) {
            throw std::out_of_range("PiecewiseAffineLambda: point outside (" + bp_.front().to_string() + ", " +
                                    bp_.back().to_string() + "]");
        }
        // first breakpoint >= x, minus one
        std::size_t lo = 1, hi = bp_.size() - 1;
        while (lo < hi) {
            const auto mid = (lo + hi) / 2;
            if (bp_[mid] < x) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        return lo - 1;
    }

    LambdaPoly evaluate(const DyadicRational &x) const
    {
        const auto j = cell_of(x);
        return x.to_rational() * slope_[j] + intercept_[j];
    }

private:
    std::vector<DyadicRational> bp_;
    std::vector<LambdaPoly> slope_;
    std::vector<LambdaPoly> intercept_;
};

// Largest supported log2 of the cell count of one period.
inline constexpr unsigned kMaxIntegrandCellsLog2 = 24;

// Exact representation of x -> (K(x + t) - K(x)) / t over one period (-1, 1].
// Terms with k > m cancel, and for k <= m every sawtooth breakpoint of
// phi(2^{2 nu k} x) and phi(2^{2 nu k}(x + t)) lies on the grid h Z,
// h = 2^{-2 nu m - 1}, as do the sign switches of t_m. On each grid cell
// the quotient is therefore affine in x.
inline PiecewiseAffineLambda build_integrand(const SeriesParams &params, std::size_t m,
                                             ShiftRule rule = ShiftRule::Adaptive)
{
    const auto log2_cells = 2 * params.nu() * m + 2;
    if (log2_cells > kMaxIntegrandCellsLog2) {
        throw std::invalid_argument("build_integrand: 2^" + std::to_string(log2_cells) + " cells is too many");
    }
    const std::size_t n = std::size_t{1} << log2_cells;
    const auto h = shift_magnitude(params, m);
    const Rational hq = h.to_rational();

    std::vector<DyadicRational> bp;
    bp.reserve(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        bp.push_back(DyadicRational(-1) + h * DyadicRational(static_cast<long>(j)));
    }
    std::vector<LambdaPoly> slopes, intercepts;
    slopes.reserve(n);
    intercepts.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        int sign = 1;
        switch (rule) {
        case ShiftRule::Adaptive:
            sign = step_tm(params, m, bp[j + 1]).sign();
            break;
        case ShiftRule::Forward:
            sign = 1;
            break;
        case ShiftRule::Backward:
            sign = -1;
            break;
        }
        const Rational t = sign > 0 ? hq : Rational(-hq);
        // the sawtooth terms are continuous, so the cell's affine piece
        // extends to both closed ends
        const auto fa = Rational(1 / t) * exact_finite_difference(params, bp[j], m, sign);
        const auto fb = Rational(1 / t) * exact_finite_difference(params, bp[j + 1], m, sign);
        auto slope = Rational(1 / hq) * (fb - fa);
        auto intercept = fa - bp[j].to_rational() * slope;
        slopes.push_back(std::move(slope));
        intercepts.push_back(std::move(intercept));
    }
    return PiecewiseAffineLambda(std::move(bp), std::move(slopes), std::move(intercepts));
}

} // namespace knopp

#endif
