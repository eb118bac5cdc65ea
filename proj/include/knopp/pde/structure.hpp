#ifndef KNOPP_PDE_STRUCTURE_HPP
#define KNOPP_PDE_STRUCTURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "operators.hpp"

namespace knopp::pde
{

// Uniform random points of the box [lo, hi] that lie in the domain.
inline std::vector<Vec> random_samples(const Vec &lo, const Vec &hi, std::size_t count, std::uint64_t seed,
                                       const Domain &domain = Domain::all())
{
    std::mt19937_64 rng(seed);
    std::vector<std::uniform_real_distribution<double>> coord;
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        coord.emplace_back(lo(i), hi(i));
    }
    std::vector<Vec> out;
    out.reserve(count);
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > 1000 * count + 1000) {
            throw DomainError("random_samples: box hardly meets the domain");
        }
        Vec p(lo.size());
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            p(i) = coord[static_cast<std::size_t>(i)](rng);
        }
        if (domain.contains(p)) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

struct StructureOptions {
    double constancy_tol = 1e-10;
    double rank_tol = 1e-8;
    double fd_step = 1e-5; // only used when the field has no gradient rule
};

// First-order facts behind the contracted systems. Without a Hamiltonian:
// |Du|^2 constant kills Du D(|Du|^2 / 2) and full rank in zero codimension
// kills [Du]^perp. With H: H(Du) constant kills H_P(Du) D(H(Du)) and H_P(Du)
// constant kills Div(H_P(Du)).
struct StructureReport {
    std::size_t samples = 0;
    bool with_hamiltonian = false;

    double frob2_min = std::numeric_limits<double>::infinity();
    double frob2_max = -std::numeric_limits<double>::infinity();
    int rank_min = std::numeric_limits<int>::max();
    int rank_max = std::numeric_limits<int>::min();
    std::size_t rank_ambiguous = 0;
    std::optional<double> det_min; // square Du only

    double H_min = std::numeric_limits<double>::infinity();
    double H_max = -std::numeric_limits<double>::infinity();
    double HP_spread = 0; // max |H_P(Du(x)) - H_P(Du(x_0))|_F

    bool first_term_zero = false;
    bool normal_term_zero = false;

    bool positive() const
    {
        return samples > 0 && first_term_zero && normal_term_zero;
    }
    double frob2_spread() const
    {
        return frob2_max - frob2_min;
    }
    double H_spread() const
    {
        return H_max - H_min;
    }
};

inline StructureReport verify_first_order_structure(const VectorField &u, const std::vector<Vec> &samples,
                                                    const Hamiltonian *H = nullptr, const StructureOptions &opts = {})
{
    StructureReport r;
    r.with_hamiltonian = H != nullptr;
    std::optional<Mat> hp0;
    for (const auto &x : samples) {
        const Mat Du = gradient_matrix(u, x, opts.fd_step);
        ++r.samples;
        const double f2 = Du.squaredNorm();
        r.frob2_min = std::min(r.frob2_min, f2);
        r.frob2_max = std::max(r.frob2_max, f2);
        const int rank = numerical_rank(Du, opts.rank_tol);
        if (rank < 0) {
            ++r.rank_ambiguous;
        } else {
            r.rank_min = std::min(r.rank_min, rank);
            r.rank_max = std::max(r.rank_max, rank);
        }
        if (Du.rows() == Du.cols()) {
            const double d = Du.determinant();
            r.det_min = r.det_min ? std::min(*r.det_min, d) : d;
        }
        if (H) {
            const double h = H->value(Du);
            r.H_min = std::min(r.H_min, h);
            r.H_max = std::max(r.H_max, h);
            const Mat G = H->gradient(Du);
            if (!hp0) {
                hp0 = G;
            }
            r.HP_spread = std::max(r.HP_spread, (G - *hp0).norm());
        }
    }
    if (r.samples == 0) {
        return r;
    }
    if (H) {
        r.first_term_zero = r.H_spread() <= opts.constancy_tol;
        r.normal_term_zero = r.HP_spread <= opts.constancy_tol;
    } else {
        const auto N = static_cast<int>(u.dim_out);
        r.first_term_zero = r.frob2_spread() <= opts.constancy_tol;
        r.normal_term_zero = r.rank_ambiguous == 0 && r.rank_min == N && N <= static_cast<int>(u.dim_in);
    }
    return r;
}

// Where the sampled gradients sit relative to the segment [A, B] (matrices,
// or 1 x n rows in the scalar case): the parameter t of the nearest point
// and the distance to the line through A and B.
struct SegmentConfinement {
    double t_min = std::numeric_limits<double>::infinity();
    double t_max = -std::numeric_limits<double>::infinity();
    double max_distance = 0;
    bool inside = false; // 0 < t < 1 strictly and distance <= tol
};

inline SegmentConfinement gradient_segment_check(const VectorField &u, const std::vector<Vec> &samples, const Mat &A,
                                                 const Mat &B, double dist_tol = 1e-12, double fd_step = 1e-5)
{
    SegmentConfinement c;
    const Mat d = B - A;
    const double len2 = d.squaredNorm();
    for (const auto &x : samples) {
        const Mat P = gradient_matrix(u, x, fd_step);
        const double t = (P - A).cwiseProduct(d).sum() / len2;
        c.t_min = std::min(c.t_min, t);
        c.t_max = std::max(c.t_max, t);
        c.max_distance = std::max(c.max_distance, (P - A - t * d).norm());
    }
    c.inside = !samples.empty() && c.t_min > 0 && c.t_max < 1 && c.max_distance <= dist_tol * std::sqrt(len2);
    return c;
}

inline constexpr std::uint8_t kPhaseAmbiguous = 254;
inline constexpr std::uint8_t kPhaseOutside = 255;

// Regular grid over [x0, x1] x [y0, y1]; points failing the mask count as outside.
struct PhaseGrid {
    double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
    std::size_t nx = 101, ny = 101;
    std::function<bool(const Vec &)> mask;

    Vec point(std::size_t i, std::size_t j) const
    {
        Vec p(2);
        p << x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(nx - 1),
            y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(ny - 1);
        return p;
    }
};

// Rhombus {|x +- y| < pi - margin} on the square grid [-(pi - margin), pi - margin]^2.
inline PhaseGrid rhombus_grid(std::size_t n, double margin = 0.1)
{
    const double r = std::numbers::pi - margin;
    return {-r, r, -r, r, n, n, [r](const Vec &p) { return std::abs(p(0) + p(1)) < r && std::abs(p(0) - p(1)) < r; }};
}

struct PhaseMap {
    PhaseGrid grid;
    std::vector<std::uint8_t> ranks; // row-major, row j is y index j

    std::uint8_t at(std::size_t i, std::size_t j) const
    {
        return ranks[j * grid.nx + i];
    }
};

inline PhaseMap phase_map(const VectorField &u, const PhaseGrid &grid, double h, double tol)
{
    if (grid.nx < 2 || grid.ny < 2) {
        throw std::invalid_argument("phase_map: grid needs at least 2 x 2 points");
    }
    PhaseMap out{grid, std::vector<std::uint8_t>(grid.nx * grid.ny, kPhaseOutside)};
    for (std::size_t j = 0; j < grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const Vec p = grid.point(i, j);
            if ((grid.mask && !grid.mask(p)) || !u.domain.contains(p)) {
                continue;
            }
            Mat Du;
            try {
                Du = gradient_matrix(u, p, h);
            } catch (const DomainError &) {
                continue;
            }
            const int r = numerical_rank(Du, tol);
            out.ranks[j * grid.nx + i] = r < 0 ? kPhaseAmbiguous : static_cast<std::uint8_t>(r);
        }
    }
    return out;
}

// Plain PGM (P2); comment lines carry the header.
inline void write_pgm(std::ostream &os, const PhaseMap &m, const std::vector<std::string> &header = {})
{
    os << "P2\n";
    for (const auto &line : header) {
        os << "# " << line << '\n';
    }
    os << m.grid.nx << ' ' << m.grid.ny << "\n255\n";
    // top row is the largest y
    for (std::size_t jj = 0; jj < m.grid.ny; ++jj) {
        const std::size_t j = m.grid.ny - 1 - jj;
        for (std::size_t i = 0; i < m.grid.nx; ++i) {
            os << (i ? " " : "") << static_cast<int>(m.at(i, j));
        }
        os << '\n';
    }
}

inline void write_csv(std::ostream &os, const PhaseMap &m, const std::vector<std::string> &header = {})
{
    for (const auto &line : header) {
        os << "# " << line << '\n';
    }
    os << "i,j,x,y,rank\n" << std::setprecision(17);
    for (std::size_t j = 0; j < m.grid.ny; ++j) {
        for (std::size_t i = 0; i < m.grid.nx; ++i) {
            const Vec p = m.grid.point(i, j);
            os << i << ',' << j << ',' << p(0) << ',' << p(1) << ',' << static_cast<int>(m.at(i, j)) << '\n';
        }
    }
}

struct ResidualRow {
    double h = 0;
    double residual = 0; // max over evaluated points of |operator|
    std::size_t evaluated = 0;
    std::size_t skipped = 0; // rank-ambiguous points
};

struct ResidualReport {
    std::string operator_name;
    std::vector<Vec> points;
    std::vector<ResidualRow> rows; // decreasing h

    // residual(h_k) / residual(h_{k+1})
    std::vector<double> ratios() const
    {
        std::vector<double> out;
        for (std::size_t k = 1; k < rows.size(); ++k) {
            out.push_back(rows[k - 1].residual / rows[k].residual);
        }
        return out;
    }
    double max_residual() const
    {
        double m = 0;
        for (const auto &r : rows) {
            m = std::max(m, r.residual);
        }
        return m;
    }
};

using PointResidual = std::function<double(const Vec &, double)>;

inline ResidualReport residual_table(std::string name, const PointResidual &op, std::vector<Vec> points,
                                     std::vector<double> hs)
{
    std::sort(hs.begin(), hs.end(), std::greater<>());
    ResidualReport rep{std::move(name), std::move(points), {}};
    for (const double h : hs) {
        ResidualRow row{h, 0, 0, 0};
        for (const auto &x : rep.points) {
            try {
                row.residual = std::max(row.residual, std::abs(op(x, h)));
                ++row.evaluated;
            } catch (const RankAmbiguous &) {
                ++row.skipped;
            }
        }
        rep.rows.push_back(row);
    }
    return rep;
}

inline PointResidual vector_laplacian_residual(VectorField u, double tol)
{
    return [u = std::move(u), tol](const Vec &x, double h) {
        return infinity_laplacian_vector(u, x, h, tol).value.lpNorm<Eigen::Infinity>();
    };
}

inline PointResidual scalar_laplacian_residual(ScalarField u)
{
    return [u = std::move(u)](const Vec &x, double h) { return infinity_laplacian_scalar(u, x, h); };
}

inline PointResidual aronsson_system_residual(Hamiltonian H, VectorField u, double tol)
{
    return [H = std::move(H), u = std::move(u), tol](const Vec &x, double h) {
        return aronsson_system(H, u, x, h, tol).value.lpNorm<Eigen::Infinity>();
    };
}

inline PointResidual aronsson_scalar_residual(Hamiltonian H, ScalarField u)
{
    return [H = std::move(H), u = std::move(u)](const Vec &x, double h) { return aronsson_scalar(H, u, x, h); };
}

inline void write_csv(std::ostream &os, const ResidualReport &r, const std::vector<std::string> &header = {})
{
    for (const auto &line : header) {
        os << "# " << line << '\n';
    }
    os << "operator,h,residual,ratio,evaluated,skipped\n" << std::setprecision(17);
    const auto ratios = r.ratios();
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        const auto &row = r.rows[k];
        os << r.operator_name << ',' << row.h << ',' << row.residual << ',';
        if (k > 0) {
            os << ratios[k - 1];
        }
        os << ',' << row.evaluated << ',' << row.skipped << '\n';
    }
}

} // namespace knopp::pde

#endif
