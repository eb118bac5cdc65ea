#ifndef KNOPP_PDE_OPERATORS_HPP
#define KNOPP_PDE_OPERATORS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "fields.hpp"

namespace knopp::pde
{

namespace detail
{

inline void require_step(double h)
{
    if (!(h > 0) || !std::isfinite(h)) {
        throw std::invalid_argument("finite-difference step must be positive");
    }
}

inline Vec shifted(const Vec &x, Eigen::Index i, double d)
{
    Vec y = x;
    y(i) += d;
    return y;
}

inline void require_inside(const Domain &dom, const Vec &p)
{
    if (!dom.contains(p)) {
        throw DomainError("stencil point outside the " + dom.name() + " domain (point too close to the boundary)");
    }
}

// central differences of a vector-valued rule; column i is d/dx_i
template <class F>
Mat central_jacobian(const F &f, const Domain &dom, const Vec &x, double h)
{
    require_step(h);
    const auto n = x.size();
    Mat J;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec xp = shifted(x, i, h);
        const Vec xm = shifted(x, i, -h);
        require_inside(dom, xp);
        require_inside(dom, xm);
        const Vec d = (f(xp) - f(xm)) / (2 * h);
        if (i == 0) {
            J.resize(d.size(), n);
        }
        J.col(i) = d;
    }
    return J;
}

} // namespace detail

inline Vec grad_fd(const ScalarField &f, const Vec &x, double h)
{
    const auto wrap = [&f](const Vec &p) { return Vec::Constant(1, f.eval(p)); };
    return detail::central_jacobian(wrap, f.domain, x, h).row(0).transpose();
}

// N x n matrix of central differences
inline Mat jacobian_fd(const VectorField &u, const Vec &x, double h)
{
    return detail::central_jacobian(u.eval, u.domain, x, h);
}

struct HessianFd {
    std::vector<Mat> components; // one symmetric n x n matrix per output
    double symmetry_defect = 0;  // max |H_ij - H_ji| before averaging
};

// Second differences. With a closed-form first-derivative rule, the Hessian
// is the central difference of that rule (so the raw matrix is not exactly
// symmetric); otherwise the standard 3-point diagonal and 4-point mixed
// stencils on values are used.
inline HessianFd hess_fd(const VectorField &u, const Vec &x, double h)
{
    if (u.regularity != Regularity::Smooth) {
        throw RegularityError(std::string("second differences refused for a field tagged ") +
                              to_string(u.regularity));
    }
    detail::require_step(h);
    const auto n = x.size();
    const auto N = static_cast<Eigen::Index>(u.dim_out);
    HessianFd out;
    out.components.assign(static_cast<std::size_t>(N), Mat::Zero(n, n));
    if (u.jacobian) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Vec xp = detail::shifted(x, j, h);
            const Vec xm = detail::shifted(x, j, -h);
            detail::require_inside(u.domain, xp);
            detail::require_inside(u.domain, xm);
            const Mat d = (u.jacobian(xp) - u.jacobian(xm)) / (2 * h);
            for (Eigen::Index b = 0; b < N; ++b) {
                out.components[static_cast<std::size_t>(b)].col(j) = d.row(b).transpose();
            }
        }
    } else {
        const Vec f0 = u.eval(x);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vec xp = detail::shifted(x, i, h);
            const Vec xm = detail::shifted(x, i, -h);
            detail::require_inside(u.domain, xp);
            detail::require_inside(u.domain, xm);
            const Vec d2 = (u.eval(xp) - 2 * f0 + u.eval(xm)) / (h * h);
            for (Eigen::Index b = 0; b < N; ++b) {
                out.components[static_cast<std::size_t>(b)](i, i) = d2(b);
            }
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const Vec pp = detail::shifted(xp, j, h);
                const Vec pm = detail::shifted(xp, j, -h);
                const Vec mp = detail::shifted(xm, j, h);
                const Vec mm = detail::shifted(xm, j, -h);
                for (const auto *p : {&pp, &pm, &mp, &mm}) {
                    detail::require_inside(u.domain, *p);
                }
                const Vec m = (u.eval(pp) - u.eval(pm) - u.eval(mp) + u.eval(mm)) / (4 * h * h);
                for (Eigen::Index b = 0; b < N; ++b) {
                    out.components[static_cast<std::size_t>(b)](i, j) = m(b);
                    out.components[static_cast<std::size_t>(b)](j, i) = m(b);
                }
            }
        }
    }
    for (auto &H : out.components) {
        out.symmetry_defect = std::max(out.symmetry_defect, (H - H.transpose()).cwiseAbs().maxCoeff());
        H = 0.5 * (H + H.transpose()).eval();
    }
    return out;
}

inline HessianFd hess_fd(const ScalarField &f, const Vec &x, double h)
{
    return hess_fd(as_vector_field(f), x, h);
}

// Du from the closed-form rule when present, central differences otherwise.
inline Mat gradient_matrix(const VectorField &u, const Vec &x, double h)
{
    return u.jacobian ? u.jacobian(x) : jacobian_fd(u, x, h);
}

// Du (x) Du : D^2 u = D_i u D_j u D^2_ij u
inline double infinity_laplacian_scalar(const ScalarField &u, const Vec &x, double h)
{
    const auto v = as_vector_field(u);
    const Vec p = gradient_matrix(v, x, h).row(0).transpose();
    const Mat H = hess_fd(v, x, h).components.front();
    return p.dot(H * p);
}

// H_p(Du) (x) H_p(Du) : D^2 u
inline double aronsson_scalar(const Hamiltonian &H, const ScalarField &u, const Vec &x, double h)
{
    const auto v = as_vector_field(u);
    const Mat Du = gradient_matrix(v, x, h);
    const Vec q = H.gradient(Du).row(0).transpose();
    const Mat D2 = hess_fd(v, x, h).components.front();
    return q.dot(D2 * q);
}

struct Projection {
    Mat P;         // N x N projector onto N(A^T)
    int rank = 0;  // rank of A at the given tolerance
    double smallest_kept_ratio = 1; // sigma_r / sigma_1 of the last kept value
};

// Orthogonal projector onto the complement of the column space of A. Singular
// values below tol * sigma_1 count as zero; a ratio in [tol, 10 tol] throws.
inline Projection normal_projection_info(const Mat &A, double tol)
{
    if (!(tol > 0)) {
        throw std::invalid_argument("normal_projection: tol must be positive");
    }
    const auto N = A.rows();
    Projection out{Mat::Identity(N, N), 0, 1};
    if (A.size() == 0) {
        return out;
    }
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU);
    const auto &s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0) {
        return out;
    }
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double ratio = s(i) / s(0);
        if (ratio >= tol && ratio <= 10 * tol) {
            throw RankAmbiguous("normal_projection: singular value ratio " + std::to_string(ratio) +
                                    " inside the ambiguity band",
                                ratio);
        }
        if (ratio > 10 * tol) {
            ++r;
            out.smallest_kept_ratio = ratio;
        }
    }
    const Mat U = svd.matrixU().leftCols(r);
    out.P -= U * U.transpose();
    out.rank = r;
    return out;
}

inline Mat normal_projection(const Mat &A, double tol)
{
    return normal_projection_info(A, tol).P;
}

// numerical rank with the same band convention; -1 when ambiguous
inline int numerical_rank(const Mat &A, double tol)
{
    try {
        return normal_projection_info(A, tol).rank;
    } catch (const RankAmbiguous &) {
        return -1;
    }
}

struct VectorOperatorValue {
    Vec value;      // tangential + normal
    Vec tangential; // first term
    Vec normal;     // projection term
    int rank = 0;
};

// D_i u_a D_j u_b D^2_ij u_b + |Du|^2 [Du]^perp_ab D^2_ii u_b
inline VectorOperatorValue infinity_laplacian_vector(const VectorField &u, const Vec &x, double h, double tol)
{
    const Mat Du = gradient_matrix(u, x, h);
    const auto D2 = hess_fd(u, x, h).components;
    const auto proj = normal_projection_info(Du, tol);
    const auto N = Du.rows();
    Vec tangential = Vec::Zero(N);
    Vec laplace(N);
    for (Eigen::Index b = 0; b < N; ++b) {
        const Mat &Hb = D2[static_cast<std::size_t>(b)];
        // (Du Hb Du^T)_{a b'} summed with b' = b
        tangential += Du * (Hb * Du.row(b).transpose());
        laplace(b) = Hb.trace();
    }
    VectorOperatorValue out;
    out.tangential = tangential;
    out.normal = Du.squaredNorm() * (proj.P * laplace);
    out.value = out.tangential + out.normal;
    out.rank = proj.rank;
    return out;
}

// H_PP(P) as an (N n) x (N n) matrix, row (g, i) and column (b, j) flattened
// row-major, by central differences of the gradient rule with step eps.
inline Mat hamiltonian_hessian_fd(const Hamiltonian &H, const Mat &P, double eps)
{
    detail::require_step(eps);
    const auto N = P.rows();
    const auto n = P.cols();
    Mat out(N * n, N * n);
    for (Eigen::Index b = 0; b < N; ++b) {
        for (Eigen::Index j = 0; j < n; ++j) {
            Mat plus = P, minus = P;
            plus(b, j) += eps;
            minus(b, j) -= eps;
            const Mat d = (H.gradient(plus) - H.gradient(minus)) / (2 * eps);
            for (Eigen::Index g = 0; g < N; ++g) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    out(g * n + i, b * n + j) = d(g, i);
                }
            }
        }
    }
    return out;
}

inline constexpr double kDefaultHamiltonianStep = 1e-4;

// (H_P (x) H_P + H [H_P]^perp H_PP)(Du) : D^2 u. With H = |P|^2 / 2 the
// normal term is half of the one in infinity_laplacian_vector.
inline VectorOperatorValue aronsson_system(const Hamiltonian &H, const VectorField &u, const Vec &x, double h,
                                           double tol, double hpp_step = kDefaultHamiltonianStep)
{
    const Mat Du = gradient_matrix(u, x, h);
    const auto D2 = hess_fd(u, x, h).components;
    const Mat G = H.gradient(Du);
    const Mat Hpp = hamiltonian_hessian_fd(H, Du, hpp_step);
    const auto proj = normal_projection_info(G, tol);
    const auto N = Du.rows();
    const auto n = Du.cols();

    Vec tangential = Vec::Zero(N);
    Vec inner = Vec::Zero(N); // H_PP(Du)_{g i, b j} D^2_ij u_b
    for (Eigen::Index b = 0; b < N; ++b) {
        const Mat &Hb = D2[static_cast<std::size_t>(b)];
        tangential += G * (Hb * G.row(b).transpose());
        for (Eigen::Index g = 0; g < N; ++g) {
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    inner(g) += Hpp(g * n + i, b * n + j) * Hb(i, j);
                }
            }
        }
    }
    VectorOperatorValue out;
    out.tangential = tangential;
    out.normal = H.value(Du) * (proj.P * inner);
    out.value = out.tangential + out.normal;
    out.rank = proj.rank;
    return out;
}

} // namespace knopp::pde

#endif
