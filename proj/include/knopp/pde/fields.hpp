#ifndef KNOPP_PDE_FIELDS_HPP
#define KNOPP_PDE_FIELDS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace knopp::pde
{

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Regularity { Smooth, C1, C1Alpha };

inline const char *to_string(Regularity r)
{
    switch (r) {
    case Regularity::Smooth:
        return "smooth";
    case Regularity::C1:
        return "C1";
    case Regularity::C1Alpha:
        return "C1_alpha";
    }
    return "unknown";
}

class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Second derivatives requested of a field that only has first derivatives.
class RegularityError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

// A singular value sits inside the band [tol, 10 tol] relative to the
// largest one, so the rank is not decided.
class RankAmbiguous : public std::runtime_error
{
public:
    RankAmbiguous(const std::string &what, double ratio) : std::runtime_error(what), ratio_(ratio)
    {
    }
    double ratio() const noexcept
    {
        return ratio_;
    }

private:
    double ratio_;
};

// Open region of R^n.
struct Domain {
    enum class Kind { All, Rhombus, Box, Custom };
    Kind kind = Kind::All;
    Vec lo; // Box only
    Vec hi;
    std::function<bool(const Vec &)> predicate; // Custom only
    std::string label;

    static Domain all()
    {
        return {};
    }
    // {(x, y) : |x + y| < pi, |x - y| < pi}
    static Domain rhombus()
    {
        return {Kind::Rhombus, {}, {}, {}, {}};
    }
    static Domain box(Vec lo, Vec hi)
    {
        if (lo.size() != hi.size() || ((hi - lo).array() <= 0).any()) {
            throw std::invalid_argument("Domain::box: need lo < hi componentwise");
        }
        return {Kind::Box, std::move(lo), std::move(hi), {}, {}};
    }
    static Domain custom(std::function<bool(const Vec &)> pred, std::string label)
    {
        return {Kind::Custom, {}, {}, std::move(pred), std::move(label)};
    }

    bool contains(const Vec &x) const
    {
        switch (kind) {
        case Kind::All:
            return x.allFinite();
        case Kind::Rhombus:
            return x.size() == 2 && std::abs(x(0) + x(1)) < std::numbers::pi && std::abs(x(0) - x(1)) < std::numbers::pi;
        case Kind::Box:
            return x.size() == lo.size() && (x.array() > lo.array()).all() && (x.array() < hi.array()).all();
        case Kind::Custom:
            return predicate(x);
        }
        return false;
    }

    std::string name() const
    {
        switch (kind) {
        case Kind::All:
            return "all";
        case Kind::Rhombus:
            return "rhombus";
        case Kind::Box:
            return "box";
        case Kind::Custom:
            return label;
        }
        return "unknown";
    }
};

struct ScalarField {
    std::size_t dim = 2;
    std::function<double(const Vec &)> eval;
    Regularity regularity = Regularity::Smooth;
    Domain domain;
    std::function<Vec(const Vec &)> gradient; // closed form, optional

    double operator()(const Vec &x) const
    {
        return eval(x);
    }
    bool has_gradient() const
    {
        return static_cast<bool>(gradient);
    }
};

// u : R^n -> R^N; the jacobian rule returns the N x n matrix Du.
struct VectorField {
    std::size_t dim_in = 2;
    std::size_t dim_out = 2;
    std::function<Vec(const Vec &)> eval;
    Regularity regularity = Regularity::Smooth;
    Domain domain;
    std::function<Mat(const Vec &)> jacobian;

    Vec operator()(const Vec &x) const
    {
        return eval(x);
    }
    bool has_jacobian() const
    {
        return static_cast<bool>(jacobian);
    }
};

inline VectorField as_vector_field(const ScalarField &f)
{
    VectorField u;
    u.dim_in = f.dim;
    u.dim_out = 1;
    u.eval = [e = f.eval](const Vec &x) { return Vec::Constant(1, e(x)); };
    u.regularity = f.regularity;
    u.domain = f.domain;
    if (f.gradient) {
        u.jacobian = [g = f.gradient](const Vec &x) -> Mat { return g(x).transpose(); };
    }
    return u;
}

// v(z) = u(Q z) for orthogonal Q. The infinity-Laplacian, the Aronsson
// operators and the rank of Du are invariant under this change of variables,
// so v carries the same residuals while coordinate stencils for v sample u
// along the columns of Q.
inline VectorField compose_orthogonal(const VectorField &u, const Mat &Q)
{
    if (Q.rows() != static_cast<Eigen::Index>(u.dim_in) || !(Q.transpose() * Q).isIdentity(1e-12)) {
        throw std::invalid_argument("compose_orthogonal: Q must be an orthogonal dim_in x dim_in matrix");
    }
    VectorField v;
    v.dim_in = u.dim_in;
    v.dim_out = u.dim_out;
    v.eval = [e = u.eval, Q](const Vec &z) { return e(Q * z); };
    if (u.jacobian) {
        v.jacobian = [j = u.jacobian, Q](const Vec &z) -> Mat { return j(Q * z) * Q; };
    }
    v.regularity = u.regularity;
    v.domain = Domain::custom([d = u.domain, Q](const Vec &z) { return d.contains(Q * z); },
                              "rotated " + u.domain.name());
    return v;
}

// H on N x n gradient matrices; scalar problems use N = 1.
struct Hamiltonian {
    std::size_t rows = 1;
    std::size_t cols = 2;
    std::function<double(const Mat &)> value;
    std::function<Mat(const Mat &)> gradient;
    Regularity regularity = Regularity::Smooth;
    std::string name;

    double operator()(const Mat &p) const
    {
        return value(p);
    }
    double operator()(const Vec &p) const
    {
        return value(p.transpose());
    }
    Mat grad(const Mat &p) const
    {
        return gradient(p);
    }
    Vec grad(const Vec &p) const
    {
        return gradient(p.transpose()).transpose();
    }
};

// H(P) = |P|^2 / 2
inline Hamiltonian quadratic_hamiltonian(std::size_t rows, std::size_t cols)
{
    return {rows, cols, [](const Mat &p) { return 0.5 * p.squaredNorm(); }, [](const Mat &p) -> Mat { return p; },
            Regularity::Smooth, "half_squared_norm"};
}

// Squared Frobenius distance to the segment [A, B] of matrices, gradient
// 2 (P - proj P). C^{1,1} everywhere, quadratic near the segment interior.
inline Hamiltonian segment_distance_hamiltonian(const Mat &A, const Mat &B, std::string name = "segment_distance")
{
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw std::invalid_argument("segment_distance_hamiltonian: shape mismatch");
    }
    const Mat d = B - A;
    const double len2 = d.squaredNorm();
    if (!(len2 > 0)) {
        throw std::invalid_argument("segment_distance_hamiltonian: degenerate segment");
    }
    auto proj = [A, d, len2](const Mat &p) -> Mat {
        const double t = std::clamp((p - A).cwiseProduct(d).sum() / len2, 0.0, 1.0);
        return A + t * d;
    };
    return {static_cast<std::size_t>(A.rows()),
            static_cast<std::size_t>(A.cols()),
            [proj](const Mat &p) { return (p - proj(p)).squaredNorm(); },
            [proj](const Mat &p) -> Mat { return 2.0 * (p - proj(p)); },
            Regularity::C1,
            std::move(name)};
}

// Central-difference gradient of the value rule, for checking gradient rules.
inline Mat hamiltonian_gradient_fd(const Hamiltonian &H, const Mat &p, double h)
{
    Mat g(p.rows(), p.cols());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            Mat plus = p, minus = p;
            plus(i, j) += h;
            minus(i, j) -= h;
            g(i, j) = (H(plus) - H(minus)) / (2 * h);
        }
    }
    return g;
}

} // namespace knopp::pde

#endif
