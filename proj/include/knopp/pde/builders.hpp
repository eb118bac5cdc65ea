#ifndef KNOPP_PDE_BUILDERS_HPP
#define KNOPP_PDE_BUILDERS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "../certify/bounds.hpp"
#include "../knopp_series.hpp"
#include "fields.hpp"

namespace knopp::pde
{

// One-variable profile: K in the planar map, F or f in the segment builders.
struct Profile1d {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative; // optional
    double value_bound = std::numeric_limits<double>::infinity();      // sup |value|
    double derivative_bound = std::numeric_limits<double>::infinity(); // sup |derivative|
    // |value(s) - value(t)| <= modulus_constant |s - t|^modulus_exponent for |s - t| <= 2
    double modulus_constant = std::numeric_limits<double>::infinity();
    double modulus_exponent = 1;
    double period = 0; // 0 when not periodic
    bool smooth = true;
};

inline Profile1d zero_profile()
{
    return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }, 0, 0, 0, 1, 0, true};
}

inline Profile1d constant_profile(double c)
{
    return {"constant", [c](double) { return c; }, [](double) { return 0.0; }, std::abs(c), 0, 0, 1, 0, true};
}

// a sin t
inline Profile1d sine_profile(double amplitude)
{
    const double a = std::abs(amplitude);
    return {"sine",
            [amplitude](double t) { return amplitude * std::sin(t); },
            [amplitude](double t) { return amplitude * std::cos(t); },
            a,
            a,
            a,
            1,
            0,
            true};
}

// scale * K_{alpha,nu}; sup bound scale / (1 - lambda), Hoelder modulus scale * C(alpha, nu)
inline Profile1d knopp_profile(const SeriesParams &params, double scale)
{
    const double lambda = params.lambda().mid_double();
    const auto nu = params.nu();
    const Enclosure sup = Enclosure(Rational(1), params.precision()) / (Rational(1) - params.lambda());
    const double C = holder_constant(params).hi_double();
    const double s = std::abs(scale);
    Profile1d p;
    p.name = "knopp:" + knopp::to_string(params.alpha()) + "," + std::to_string(nu);
    p.value = [scale, lambda, nu](double t) { return scale * knopp_double(lambda, nu, t); };
    p.value_bound = std::nextafter(s * sup.hi_double(), std::numeric_limits<double>::infinity());
    p.modulus_constant = std::nextafter(s * C, std::numeric_limits<double>::infinity());
    p.modulus_exponent = params.alpha().get_d();
    p.period = 2;
    p.smooth = false;
    return p;
}

// scale * int_0^t K_{alpha,nu}, derivative scale * K
inline Profile1d knopp_primitive_profile(const SeriesParams &params, double scale)
{
    const auto k = knopp_profile(params, scale);
    const double lambda = params.lambda().mid_double();
    const auto nu = params.nu();
    Profile1d p;
    p.name = "int " + k.name;
    p.value = [scale, lambda, nu](double t) { return scale * knopp_primitive_double(lambda, nu, t); };
    p.derivative = k.value;
    p.derivative_bound = k.value_bound;
    p.modulus_constant = k.value_bound;
    p.modulus_exponent = 1;
    p.smooth = false;
    return p;
}

// Primitive of K scaled so that sup |F'| <= 1 - delta.
inline Profile1d scaled_knopp_primitive(const SeriesParams &params, double delta)
{
    if (!(delta > 0 && delta < 1)) {
        throw std::invalid_argument("scaled_knopp_primitive: delta must lie in (0, 1)");
    }
    const double sup = knopp_profile(params, 1.0).value_bound;
    return knopp_primitive_profile(params, (1 - delta) / sup);
}

struct SegmentSpec {
    Vec a;
    Vec b;
    std::optional<Vec> eta;
    double c = 0;
    Mat C; // value of H_P on the matrix segment, when known

    void validate() const
    {
        if (a.size() != b.size() || a.size() == 0) {
            throw std::invalid_argument("SegmentSpec: a and b must be vectors of the same positive size");
        }
        if ((a - b).norm() == 0) {
            throw std::invalid_argument("SegmentSpec: a == b");
        }
        if (eta && eta->norm() == 0) {
            throw std::invalid_argument("SegmentSpec: eta must be non-zero");
        }
    }
    Mat matrix_a() const
    {
        return *eta * a.transpose();
    }
    Mat matrix_b() const
    {
        return *eta * b.transpose();
    }
};

namespace detail
{

inline void require_contraction(const Profile1d &f, const char *who)
{
    if (!f.derivative) {
        throw std::invalid_argument(std::string(who) + ": profile needs a derivative rule");
    }
    if (!(f.derivative_bound < 1)) {
        throw std::invalid_argument(std::string(who) + ": need sup |F'| < 1, got " +
                                    std::to_string(f.derivative_bound));
    }
}

} // namespace detail

// u(x) = (b + a)/2 . x + F((b - a)/2 . x); Du = (b+a)/2 + F'(.) (b-a)/2 lies in (a, b).
inline ScalarField build_scalar_aronsson_solution(const SegmentSpec &seg, const Profile1d &F)
{
    seg.validate();
    detail::require_contraction(F, "build_scalar_aronsson_solution");
    const Vec mid = (seg.b + seg.a) / 2;
    const Vec half = (seg.b - seg.a) / 2;
    ScalarField u;
    u.dim = static_cast<std::size_t>(seg.a.size());
    u.eval = [mid, half, v = F.value](const Vec &x) { return mid.dot(x) + v(half.dot(x)); };
    u.gradient = [mid, half, d = F.derivative](const Vec &x) -> Vec { return mid + d(half.dot(x)) * half; };
    u.regularity = F.smooth ? Regularity::Smooth : Regularity::C1Alpha;
    return u;
}

// H(p) = dist(p, [a, b])^2: zero with zero gradient on the segment.
inline Hamiltonian flat_segment_hamiltonian(const SegmentSpec &seg)
{
    seg.validate();
    return segment_distance_hamiltonian(seg.a.transpose(), seg.b.transpose(), "flat_segment");
}

// u(x) = (x . (b+a)/2) eta + f(x . (b-a)/2) eta, Du = eta (x) [(b+a)/2 + f'(.) (b-a)/2]
inline VectorField build_aronsson_map(const SegmentSpec &seg, const Profile1d &f)
{
    seg.validate();
    if (!seg.eta) {
        throw std::invalid_argument("build_aronsson_map: segment needs eta");
    }
    detail::require_contraction(f, "build_aronsson_map");
    const Vec mid = (seg.b + seg.a) / 2;
    const Vec half = (seg.b - seg.a) / 2;
    const Vec eta = *seg.eta;
    VectorField u;
    u.dim_in = static_cast<std::size_t>(seg.a.size());
    u.dim_out = static_cast<std::size_t>(eta.size());
    u.eval = [mid, half, eta, v = f.value](const Vec &x) -> Vec { return (mid.dot(x) + v(half.dot(x))) * eta; };
    u.jacobian = [mid, half, eta, d = f.derivative](const Vec &x) -> Mat {
        return eta * (mid + d(half.dot(x)) * half).transpose();
    };
    u.regularity = f.smooth ? Regularity::Smooth : Regularity::C1Alpha;
    return u;
}

// Squared Frobenius distance to [eta (x) a, eta (x) b]; c = 0 and H_P = 0 on it.
inline Hamiltonian rank_one_flat_hamiltonian(const SegmentSpec &seg)
{
    seg.validate();
    if (!seg.eta) {
        throw std::invalid_argument("rank_one_flat_hamiltonian: segment needs eta");
    }
    return segment_distance_hamiltonian(seg.matrix_a(), seg.matrix_b(), "rank_one_flat");
}

class QuadratureError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultQuadratureTolerance = 1e-3;
inline constexpr std::size_t kMaxQuadratureCells = std::size_t{1} << 24;

// G(x) = int_0^x e^{i K(t)} dt by the composite midpoint rule. With the
// modulus |K(s) - K(t)| <= L |s - t|^g, the error on a cell of width w is at
// most 2 L (w/2)^{g+1} / (g+1), so at most tol per unit length when
// w = 2 (tol (g+1) / L)^{1/g}. Periodic profiles use a table of block sums
// over one period, built on first use.
class ExpIntegral
{
public:
    ExpIntegral(Profile1d K, double tol) : K_(std::move(K)), tol_(tol)
    {
        if (!(tol > 0)) {
            throw std::invalid_argument("ExpIntegral: tolerance must be positive");
        }
        const double L = K_.modulus_constant;
        const double g = K_.modulus_exponent;
        if (!std::isfinite(L)) {
            throw QuadratureError("quadrature tolerance unattainable: profile has no modulus of continuity");
        }
        width_ = L > 0 ? 2 * std::pow(tol * (g + 1) / L, 1 / g) : std::numeric_limits<double>::infinity();
        if (K_.period > 0) {
            const double cells = std::ceil(K_.period / std::min(width_, K_.period) / kBlock) * kBlock;
            if (cells > static_cast<double>(kMaxQuadratureCells)) {
                throw QuadratureError("quadrature tolerance unattainable: " + std::to_string(cells) +
                                      " cells per period needed");
            }
            cells_ = static_cast<std::size_t>(cells);
            width_ = K_.period / static_cast<double>(cells_);
        }
    }

    double tolerance() const noexcept
    {
        return tol_;
    }
    double cell_width() const noexcept
    {
        return width_;
    }
    // bound on |G(x) - computed G(x)|, up to floating-point rounding
    double error_bound(double x) const
    {
        return K_.modulus_constant == 0 ? 0.0 : tol_ * (std::abs(x) + width_);
    }

    // (int cos K, int sin K) over [0, x]
    std::pair<double, double> operator()(double x) const
    {
        if (K_.period > 0) {
            return periodic(x);
        }
        if (x == 0) {
            return {0, 0};
        }
        const double len = std::abs(x);
        const double n = K_.modulus_constant == 0 ? 1 : std::ceil(len / width_);
        if (n > static_cast<double>(kMaxQuadratureCells)) {
            throw QuadratureError("quadrature tolerance unattainable on [0, " + std::to_string(x) + "]");
        }
        auto [c, s] = midpoint(0, x, static_cast<std::size_t>(n));
        return {c, s};
    }

private:
    static constexpr std::size_t kBlock = 64;

    std::pair<double, double> midpoint(double a, double b, std::size_t n) const
    {
        const double w = (b - a) / static_cast<double>(n);
        double c = 0, s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double k = K_.value(a + (static_cast<double>(i) + 0.5) * w);
            c += std::cos(k);
            s += std::sin(k);
        }
        return {c * w, s * w};
    }

    void build_table() const
    {
        const std::size_t blocks = cells_ / kBlock;
        auto &sums = table_->sums;
        sums.assign(blocks + 1, {0.0, 0.0});
        for (std::size_t b = 0; b < blocks; ++b) {
            const double a = static_cast<double>(b * kBlock) * width_;
            const auto [c, s] = midpoint(a, a + kBlock * width_, kBlock);
            sums[b + 1] = {sums[b].first + c, sums[b].second + s};
        }
    }

    std::pair<double, double> periodic(double x) const
    {
        std::call_once(table_->once, [this] { build_table(); });
        const auto &sums = table_->sums;
        const double P = K_.period;
        const double q = std::floor(x / P);
        const double r = x - q * P;
        const double block_len = kBlock * width_;
        auto b = static_cast<std::size_t>(r / block_len);
        b = std::min(b, sums.size() - 1);
        const double start = static_cast<double>(b) * block_len;
        auto [c, s] = sums[b];
        const double rest = r - start;
        if (rest > 0) {
            const auto n = static_cast<std::size_t>(std::ceil(rest / width_));
            const auto [dc, ds] = midpoint(start, r, std::max<std::size_t>(n, 1));
            c += dc;
            s += ds;
        }
        return {q * sums.back().first + c, q * sums.back().second + s};
    }

    Profile1d K_;
    double tol_;
    double width_ = 0;
    std::size_t cells_ = 0;
    struct Table {
        std::once_flag once;
        std::vector<std::pair<double, double>> sums;
    };
    std::shared_ptr<Table> table_ = std::make_shared<Table>();
};

// u(x, y) = int_0^x e^{iK} + i int_0^y e^{iK} with the closed-form gradient
// Du = [[cos K(x), -sin K(y)], [sin K(x), cos K(y)]].
inline VectorField build_planar_infinity_harmonic(const Profile1d &K, double quad_tol = kDefaultQuadratureTolerance)
{
    if (!(K.value_bound < std::numbers::pi / 4)) {
        throw std::invalid_argument("build_planar_infinity_harmonic: need sup |K| < pi/4, got " +
                                    std::to_string(K.value_bound));
    }
    auto G = std::make_shared<const ExpIntegral>(K, quad_tol);
    VectorField u;
    u.dim_in = 2;
    u.dim_out = 2;
    u.eval = [G](const Vec &p) -> Vec {
        const auto [cx, sx] = (*G)(p(0));
        const auto [cy, sy] = (*G)(p(1));
        Vec out(2);
        out << cx - sy, sx + cy;
        return out;
    };
    u.jacobian = [k = K.value](const Vec &p) -> Mat {
        const double a = k(p(0));
        const double b = k(p(1));
        Mat J(2, 2);
        J << std::cos(a), -std::sin(b), std::sin(a), std::cos(b);
        return J;
    };
    u.regularity = K.smooth ? Regularity::Smooth : Regularity::C1Alpha;
    return u;
}

// e^{ix} - e^{iy} on the rhombus {|x +- y| < pi}; rank Du = 1 exactly on x = y.
inline VectorField rhombus_map()
{
    VectorField u;
    u.eval = [](const Vec &p) -> Vec {
        Vec out(2);
        out << std::cos(p(0)) - std::cos(p(1)), std::sin(p(0)) - std::sin(p(1));
        return out;
    };
    u.jacobian = [](const Vec &p) -> Mat {
        Mat J(2, 2);
        J << -std::sin(p(0)), std::sin(p(1)), std::cos(p(0)), -std::cos(p(1));
        return J;
    };
    u.domain = Domain::rhombus();
    return u;
}

// x^{4/3} - y^{4/3} on the open quadrant x, y > 0
inline ScalarField aronsson_four_thirds()
{
    ScalarField u;
    u.eval = [](const Vec &p) { return std::pow(p(0), 4.0 / 3) - std::pow(p(1), 4.0 / 3); };
    u.gradient = [](const Vec &p) -> Vec {
        Vec g(2);
        g << 4.0 / 3 * std::cbrt(p(0)), -4.0 / 3 * std::cbrt(p(1));
        return g;
    };
    const double inf = std::numeric_limits<double>::infinity();
    u.domain = Domain::box(Vec::Zero(2), Vec::Constant(2, inf));
    return u;
}

// |x|^2 in R^n, for which the infinity-Laplacian is 8 |x|^2
inline ScalarField squared_norm_field(std::size_t n = 2)
{
    ScalarField u;
    u.dim = n;
    u.eval = [](const Vec &p) { return p.squaredNorm(); };
    u.gradient = [](const Vec &p) -> Vec { return 2 * p; };
    return u;
}

// (x^2, y), whose |Du|^2 = 4 x^2 + 1 is not constant
inline VectorField parabolic_map()
{
    VectorField u;
    u.eval = [](const Vec &p) -> Vec {
        Vec out(2);
        out << p(0) * p(0), p(1);
        return out;
    };
    u.jacobian = [](const Vec &p) -> Mat {
        Mat J(2, 2);
        J << 2 * p(0), 0, 0, 1;
        return J;
    };
    return u;
}

inline VectorField affine_map(const Mat &A, const Vec &c)
{
    VectorField u;
    u.dim_in = static_cast<std::size_t>(A.cols());
    u.dim_out = static_cast<std::size_t>(A.rows());
    u.eval = [A, c](const Vec &p) -> Vec { return A * p + c; };
    u.jacobian = [A](const Vec &) -> Mat { return A; };
    return u;
}

} // namespace knopp::pde

#endif
