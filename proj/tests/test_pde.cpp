#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <knopp/pde/builders.hpp>
#include <knopp/pde/structure.hpp>

using namespace knopp;
using namespace knopp::pde;

namespace
{

Mat random_matrix(std::mt19937_64 &rng, Eigen::Index r, Eigen::Index c)
{
    std::normal_distribution<double> g;
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = g(rng);
        }
    }
    return m;
}

Vec vec2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

SegmentSpec default_segment()
{
    SegmentSpec s;
    s.a = vec2(1, 0);
    s.b = vec2(0, 1);
    s.eta = vec2(1, 2);
    return s;
}

// F(t) = -a cos t, so F' = a sin t
Profile1d sine_primitive(double a)
{
    return {"int sine", [a](double t) { return -a * std::cos(t); }, [a](double t) { return a * std::sin(t); },
            a, a, a, 1, 0, true};
}

template <class Field>
Field strip_derivative(Field f)
{
    if constexpr (std::is_same_v<Field, ScalarField>) {
        f.gradient = nullptr;
    } else {
        f.jacobian = nullptr;
    }
    return f;
}

Mat lattice_rotation()
{
    const double c = std::sqrt(0.5);
    return (Mat(2, 2) << c, -c, c, c).finished();
}

// (x^2, xy, y^2 + x): three outputs over the plane, so [Du]^perp has rank >= 1
VectorField surface_map()
{
    VectorField u;
    u.dim_in = 2;
    u.dim_out = 3;
    u.eval = [](const Vec &p) -> Vec {
        Vec o(3);
        o << p(0) * p(0), p(0) * p(1), p(1) * p(1) + p(0);
        return o;
    };
    return u;
}

} // namespace

TEST(NormalProjection, MatchesLeastSquaresProjector)
{
    std::mt19937_64 rng(41);
    for (int i = 0; i < 200; ++i) {
        const Mat A = random_matrix(rng, 4, 2);
        const Mat P = normal_projection(A, 1e-8);
        const Mat ref = Mat::Identity(4, 4) - A * (A.transpose() * A).inverse() * A.transpose();
        EXPECT_LT((P - ref).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((P * P - P).norm(), 1e-12);
        EXPECT_LT((P - P.transpose()).norm(), 1e-12);
        EXPECT_LT((P * A).norm(), 1e-12 * A.norm());
        EXPECT_EQ(numerical_rank(A, 1e-8), 2);
    }
}

TEST(NormalProjection, SpecialCases)
{
    EXPECT_TRUE(normal_projection(Mat::Zero(3, 2), 1e-8).isIdentity());
    std::mt19937_64 rng(42);
    const Mat full = random_matrix(rng, 3, 3);
    EXPECT_LT(normal_projection(full, 1e-8).norm(), 1e-12);

    const Vec eta = (Vec(3) << 1, 2, -2).finished();
    const Vec w = (Vec(2) << 3, -1).finished();
    const Mat P = normal_projection(eta * w.transpose(), 1e-8);
    const Mat expect = Mat::Identity(3, 3) - eta * eta.transpose() / eta.squaredNorm();
    EXPECT_LT((P - expect).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(numerical_rank(eta * w.transpose(), 1e-8), 1);
}

TEST(NormalProjection, AmbiguityBandThrows)
{
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 1;
    A(1, 1) = 5e-8;
    EXPECT_THROW(normal_projection(A, 1e-8), RankAmbiguous);
    EXPECT_EQ(numerical_rank(A, 1e-8), -1);
    A(1, 1) = 5e-9;
    EXPECT_EQ(numerical_rank(A, 1e-8), 1);
    A(1, 1) = 5e-7;
    EXPECT_EQ(numerical_rank(A, 1e-8), 2);
    EXPECT_THROW(normal_projection(A, 0), std::invalid_argument);
}

TEST(FiniteDifferences, JacobianSecondOrder)
{
    const auto u = rhombus_map();
    const Vec x = vec2(std::numbers::pi / 4, -std::numbers::pi / 4);
    const Mat exact = u.jacobian(x);
    double prev = 0;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const double err = (jacobian_fd(u, x, h) - exact).cwiseAbs().maxCoeff();
        EXPECT_LE(err, 10 * h * h);
        if (prev > 0) {
            EXPECT_NEAR(prev / err, 4, 0.2);
        }
        prev = err;
    }
}

TEST(FiniteDifferences, QuadraticHessianExact)
{
    const Mat M = (Mat(2, 2) << 2, -1, -1, 3).finished();
    ScalarField f;
    f.eval = [M](const Vec &p) { return p.dot(M * p); };
    const auto H = hess_fd(f, vec2(0.3, -0.7), 1e-3);
    EXPECT_LT((H.components.front() - 2 * M).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_EQ(H.symmetry_defect, 0);
}

TEST(FiniteDifferences, FourThirdsHessian)
{
    const auto u = strip_derivative(aronsson_four_thirds());
    const Vec x = vec2(0.8, 1.3);
    const Mat H = hess_fd(u, x, 1e-4).components.front();
    EXPECT_NEAR(H(0, 0), 4.0 / 9 * std::pow(0.8, -2.0 / 3), 1e-6);
    EXPECT_NEAR(H(1, 1), -4.0 / 9 * std::pow(1.3, -2.0 / 3), 1e-6);
    EXPECT_NEAR(H(0, 1), 0, 1e-6);
}

TEST(FiniteDifferences, StencilLeavingDomainThrows)
{
    const auto u = rhombus_map();
    const Vec x = vec2(std::numbers::pi - 1e-3, 0);
    EXPECT_THROW(jacobian_fd(u, x, 1e-2), DomainError);
    EXPECT_THROW(hess_fd(u, x, 1e-2), DomainError);
    EXPECT_THROW(jacobian_fd(u, vec2(0, 0), 0), std::invalid_argument);
}

TEST(Operators, VectorWithOneComponentIsScalar)
{
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> c(0.3, 2);
    const auto u = strip_derivative(aronsson_four_thirds());
    for (int i = 0; i < 50; ++i) {
        const Vec x = vec2(c(rng), c(rng));
        const auto v = infinity_laplacian_vector(as_vector_field(u), x, 1e-3, 1e-8);
        EXPECT_NEAR(v.value(0), infinity_laplacian_scalar(u, x, 1e-3), 1e-12);
        EXPECT_EQ(v.rank, 1);
        EXPECT_EQ(v.normal(0), 0);
    }
}

TEST(Operators, QuadraticHamiltonianReproducesLaplacian)
{
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> c(-1, 1);
    const auto Hs = quadratic_hamiltonian(1, 2);
    const auto s = squared_norm_field(2);
    const auto Hv = quadratic_hamiltonian(3, 2);
    const auto v = surface_map();
    for (int i = 0; i < 50; ++i) {
        const Vec x = vec2(c(rng), c(rng));
        EXPECT_NEAR(aronsson_scalar(Hs, s, x, 1e-3), infinity_laplacian_scalar(s, x, 1e-3), 1e-9);
        const auto a = aronsson_system(Hv, v, x, 1e-3, 1e-8);
        const auto l = infinity_laplacian_vector(v, x, 1e-3, 1e-8);
        EXPECT_LT((a.tangential - l.tangential).norm(), 1e-9);
        EXPECT_LT((2 * a.normal - l.normal).norm(), 1e-6 * (1 + l.normal.norm()));
        EXPECT_GT(l.normal.norm(), 1e-3);
    }
}

TEST(Operators, SquaredNormIsNotInfinityHarmonic)
{
    std::mt19937_64 rng(45);
    std::uniform_real_distribution<double> c(-2, 2);
    const auto u = squared_norm_field(3);
    for (int i = 0; i < 100; ++i) {
        Vec x(3);
        x << c(rng), c(rng), c(rng);
        EXPECT_NEAR(infinity_laplacian_scalar(u, x, 1e-3), 8 * x.squaredNorm(), 1e-6 * (1 + x.squaredNorm()));
    }
}

TEST(Operators, RankAmbiguousNearDiagonal)
{
    const auto u = rhombus_map();
    const Vec x = vec2(0.4, 0.4 + 2e-7);
    EXPECT_THROW(infinity_laplacian_vector(u, x, 1e-3, 1e-8), RankAmbiguous);
    EXPECT_EQ(infinity_laplacian_vector(u, vec2(0.4, 0.4), 1e-3, 1e-8).rank, 1);
}

TEST(Hamiltonian, GradientRulesMatchDifferences)
{
    std::mt19937_64 rng(46);
    const auto seg = default_segment();
    const std::vector<Hamiltonian> hs{quadratic_hamiltonian(2, 2), flat_segment_hamiltonian(seg),
                                      rank_one_flat_hamiltonian(seg)};
    for (const auto &H : hs) {
        for (int i = 0; i < 50; ++i) {
            const Mat P = 2 * random_matrix(rng, static_cast<Eigen::Index>(H.rows), static_cast<Eigen::Index>(H.cols));
            EXPECT_LT((H.grad(P) - hamiltonian_gradient_fd(H, P, 1e-6)).cwiseAbs().maxCoeff(), 1e-6) << H.name;
        }
    }
}

TEST(Hamiltonian, FlatOnSegment)
{
    const auto seg = default_segment();
    const auto H = rank_one_flat_hamiltonian(seg);
    for (double t : {0.0, 0.25, 0.5, 1.0}) {
        const Mat P = (1 - t) * seg.matrix_a() + t * seg.matrix_b();
        EXPECT_EQ(H(P), 0);
        EXPECT_EQ(H.grad(P).norm(), 0);
    }
    EXPECT_GT(H(Mat(Mat::Zero(2, 2))), 0);
}

TEST(Builders, ZeroProfileGivesMidpointGradient)
{
    const auto seg = default_segment();
    const auto u = build_scalar_aronsson_solution(seg, sine_primitive(0));
    const Vec x = vec2(0.3, -1.1);
    EXPECT_LT((u.gradient(x) - (seg.a + seg.b) / 2).norm(), 1e-15);
    EXPECT_NEAR(u(x), 0.5 * (0.3 - 1.1), 1e-15);
    EXPECT_THROW(build_scalar_aronsson_solution(seg, sine_primitive(1.5)), std::invalid_argument);
}

TEST(Builders, ScalarSolutionConfinedAndFlat)
{
    const auto seg = default_segment();
    const auto u = build_scalar_aronsson_solution(seg, sine_primitive(0.5));
    const auto xs = random_samples(Vec::Constant(2, -3), Vec::Constant(2, 3), 2000, 47);
    const auto conf = gradient_segment_check(as_vector_field(u), xs, seg.a.transpose(), seg.b.transpose());
    EXPECT_TRUE(conf.inside);
    EXPECT_GE(conf.t_min, 0.25 - 1e-12);
    EXPECT_LE(conf.t_max, 0.75 + 1e-12);
    const auto H = flat_segment_hamiltonian(seg);
    const auto rep = verify_first_order_structure(as_vector_field(u), xs, &H);
    EXPECT_TRUE(rep.positive());
    EXPECT_LE(rep.H_max, 1e-28);
    const auto res = residual_table("aronsson_scalar", aronsson_scalar_residual(H, u), xs, {1e-2, 5e-3});
    EXPECT_LT(res.max_residual(), 1e-20);
}

TEST(Builders, AronssonMapWithKnoppPrimitive)
{
    const auto seg = default_segment();
    const SeriesParams params(make_rational(1, 2), 2);
    const auto F = scaled_knopp_primitive(params, 0.05);
    EXPECT_LE(F.derivative_bound, 0.95 + 1e-15);
    const auto u = build_aronsson_map(seg, F);
    EXPECT_EQ(u.regularity, Regularity::C1Alpha);
    const auto xs = random_samples(Vec::Constant(2, -2), Vec::Constant(2, 2), 2000, 48);
    const auto conf = gradient_segment_check(u, xs, seg.matrix_a(), seg.matrix_b());
    EXPECT_TRUE(conf.inside);
    const auto H = rank_one_flat_hamiltonian(seg);
    const auto rep = verify_first_order_structure(u, xs, &H);
    EXPECT_TRUE(rep.positive());
    EXPECT_LE(rep.H_spread(), 1e-10);
    EXPECT_LE(rep.HP_spread, 1e-10);
    EXPECT_EQ(rep.rank_max, 1);
    EXPECT_THROW(hess_fd(u, xs.front(), 1e-3), RegularityError);
}

TEST(Builders, PlanarIdentityForZeroProfile)
{
    const auto u = build_planar_infinity_harmonic(zero_profile());
    std::mt19937_64 rng(49);
    std::uniform_real_distribution<double> c(-3, 3);
    for (int i = 0; i < 100; ++i) {
        const Vec x = vec2(c(rng), c(rng));
        EXPECT_LT((u(x) - x).norm(), 1e-12);
        EXPECT_TRUE(u.jacobian(x).isIdentity(0));
    }
}

TEST(Builders, PlanarQuadratureWithinBound)
{
    const auto K = sine_profile(0.5);
    const ExpIntegral G(K, 1e-5);
    for (double x : {0.1, 0.7, -1.3, 2.0}) {
        // composite Simpson with 2^14 panels as reference
        const int n = 1 << 14;
        double c = 0, s = 0;
        for (int k = 0; k <= n; ++k) {
            const double t = x * k / n;
            const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
            c += w * std::cos(K.value(t));
            s += w * std::sin(K.value(t));
        }
        c *= x / n / 3;
        s *= x / n / 3;
        const auto [gc, gs] = G(x);
        EXPECT_LE(std::abs(gc - c), G.error_bound(x) + 1e-12) << x;
        EXPECT_LE(std::abs(gs - s), G.error_bound(x) + 1e-12) << x;
    }
}

TEST(Builders, PlanarKnoppStructure)
{
    const SeriesParams params(make_rational(1, 2), 2);
    const auto K = knopp_profile(params, 0.25);
    const auto u = build_planar_infinity_harmonic(K);
    EXPECT_EQ(u.regularity, Regularity::C1Alpha);
    const auto xs = random_samples(Vec::Constant(2, -2), Vec::Constant(2, 2), 5000, 50);
    const auto rep = verify_first_order_structure(u, xs);
    EXPECT_TRUE(rep.positive());
    EXPECT_NEAR(rep.frob2_min, 2, 1e-12);
    EXPECT_NEAR(rep.frob2_max, 2, 1e-12);
    EXPECT_GE(*rep.det_min, std::cos(2 * K.value_bound) - 1e-12);
    for (const auto &x : xs) {
        const double d = u.jacobian(x).determinant();
        EXPECT_NEAR(d, std::cos(K.value(x(0)) - K.value(x(1))), 1e-14);
    }
    EXPECT_THROW(build_planar_infinity_harmonic(knopp_profile(params, 1.0)), std::invalid_argument);
}

TEST(Builders, PlanarSmoothJacobianMatchesValues)
{
    const auto u = build_planar_infinity_harmonic(sine_profile(0.5), 1e-6);
    const auto v = strip_derivative(u);
    for (const auto &x : {vec2(0.2, 0.9), vec2(-1.4, 0.3)}) {
        EXPECT_LT((jacobian_fd(v, x, 1e-2) - u.jacobian(x)).cwiseAbs().maxCoeff(), 5e-4);
    }
}

TEST(Builders, ParabolicControlFails)
{
    const auto xs = random_samples(Vec::Constant(2, -1), Vec::Constant(2, 1), 500, 51);
    const auto rep = verify_first_order_structure(parabolic_map(), xs);
    EXPECT_FALSE(rep.first_term_zero);
    EXPECT_FALSE(rep.positive());
}

TEST(Residuals, RhombusConvergesAtSecondOrder)
{
    const Mat Q = lattice_rotation();
    const auto v = compose_orthogonal(strip_derivative(rhombus_map()), Q);
    auto xs = random_samples(Vec::Constant(2, -2.8), Vec::Constant(2, 2.8), 200, 52,
                             Domain::custom([](const Vec &p) { return std::abs(p(0) + p(1)) < 2.8 &&
                                                                      std::abs(p(0) - p(1)) < 2.8; },
                                            "shrunk"));
    for (auto &x : xs) {
        x = (Q.transpose() * x).eval();
    }
    const auto rep = residual_table("vector", vector_laplacian_residual(v, 1e-8), xs, {0.02, 0.01, 0.005});
    for (double r : rep.ratios()) {
        EXPECT_NEAR(r, 4, 0.5);
    }
    EXPECT_LT(rep.rows.back().residual, 1e-3);
}

TEST(Residuals, FourThirdsConvergesAtSecondOrder)
{
    const auto u = strip_derivative(aronsson_four_thirds());
    const auto xs = random_samples(Vec::Constant(2, 0.5), Vec::Constant(2, 1.5), 200, 53);
    const auto rep = residual_table("scalar", scalar_laplacian_residual(u), xs, {0.02, 0.01, 0.005});
    for (double r : rep.ratios()) {
        EXPECT_NEAR(r, 4, 0.5);
    }
    std::ostringstream os;
    write_csv(os, rep, {"test"});
    EXPECT_NE(os.str().find("operator,h,residual,ratio"), std::string::npos);
}

TEST(Residuals, SquaredNormDoesNotConverge)
{
    const auto xs = random_samples(Vec::Constant(2, 0.5), Vec::Constant(2, 1.5), 50, 54);
    const auto rep =
        residual_table("scalar", scalar_laplacian_residual(squared_norm_field()), xs, {0.02, 0.01, 0.005});
    EXPECT_GT(rep.rows.back().residual, 1);
}

TEST(PhaseMap, RankOneExactlyOnDiagonal)
{
    const auto grid = rhombus_grid(41);
    const auto m = phase_map(rhombus_map(), grid, 1e-4, 1e-8);
    std::size_t inside = 0;
    for (std::size_t j = 0; j < grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const auto r = m.at(i, j);
            if (r == kPhaseOutside) {
                continue;
            }
            ++inside;
            EXPECT_EQ(r, i == j ? 1 : 2) << i << ',' << j;
        }
    }
    EXPECT_GT(inside, 700u);
    std::ostringstream os;
    write_pgm(os, m, {"rhombus"});
    EXPECT_EQ(os.str().rfind("P2\n# rhombus\n41 41\n255\n", 0), 0u);
}
