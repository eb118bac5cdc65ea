#include <random>

#include <gtest/gtest.h>

#include <knopp/dyadic.hpp>
#include <knopp/enclosure.hpp>
#include <knopp/lambda_poly.hpp>
#include <knopp/sawtooth.hpp>
#include <knopp/series_params.hpp>

#include "oracles.hpp"

using namespace knopp;

namespace
{

Rational q(long n, long d = 1)
{
    return make_rational(n, d);
}

} // namespace

TEST(Sawtooth, Examples)
{
    EXPECT_EQ(sawtooth(q(0)), q(0));
    EXPECT_EQ(sawtooth(q(1, 2)), q(1, 2));
    EXPECT_EQ(sawtooth(q(7, 2)), q(1, 2));
    EXPECT_EQ(sawtooth(q(-3)), q(1));
}

TEST(Sawtooth, MatchesIndependentTent)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto x = oracle::random_rational(rng);
        EXPECT_EQ(sawtooth(x), oracle::tent(x)) << x.get_str();
    }
}

TEST(Sawtooth, PeriodRangeAndNonExpansive)
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 1000; ++i) {
        const auto x = oracle::random_rational(rng);
        const auto y = oracle::random_rational(rng, 3);
        const auto fx = sawtooth(x);
        EXPECT_EQ(sawtooth(Rational(x + 2)), fx);
        EXPECT_GE(fx, 0);
        EXPECT_LE(fx, 1);
        EXPECT_LE(abs(Rational(fx - sawtooth(y))), abs(Rational(x - y)));
    }
}

TEST(Sawtooth, DyadicOverloadAgrees)
{
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<long> num(-100000, 100000);
    for (int i = 0; i < 1000; ++i) {
        const DyadicRational d(BigInt(num(rng)), static_cast<std::uint64_t>(i % 20));
        EXPECT_EQ(sawtooth(d).to_rational(), sawtooth(d.to_rational()));
    }
}

TEST(SawtoothEnclosure, Examples)
{
    const auto e0 = sawtooth_enclosure(Enclosure(0L));
    EXPECT_TRUE(e0.is_point());
    EXPECT_EQ(e0.lo_rational(), 0);

    const auto e1 = sawtooth_enclosure(Enclosure::from_bounds(q(1, 4), q(1, 2)));
    EXPECT_EQ(e1.lo_rational(), q(1, 4));
    EXPECT_EQ(e1.hi_rational(), q(1, 2));

    const auto e2 = sawtooth_enclosure(Enclosure::from_bounds(q(-1, 8), q(1, 8)));
    EXPECT_EQ(e2.lo_rational(), 0);
    EXPECT_EQ(e2.hi_rational(), q(1, 8));
}

TEST(SawtoothEnclosure, RejectsWideInput)
{
    EXPECT_THROW(sawtooth_enclosure(Enclosure::from_bounds(q(0), q(2))), std::invalid_argument);
}

TEST(SawtoothEnclosure, ContainsImageAndNoWiderThanInput)
{
    std::mt19937_64 rng(14);
    std::uniform_int_distribution<long> pick(-4000, 4000);
    for (int i = 0; i < 500; ++i) {
        const Rational a = q(pick(rng), 1000);
        const Rational b = a + q(std::abs(pick(rng)) % 1999, 1000);
        const auto in = Enclosure::from_bounds(a, b);
        const auto e = sawtooth_enclosure(in);
        EXPECT_LE(e.width(), in.width());
        for (int j = 0; j <= 16; ++j) {
            const Rational t = a + (b - a) * q(j, 16);
            EXPECT_TRUE(e.contains(oracle::tent(t)));
        }
    }
}

TEST(DyadicRational, CanonicalForm)
{
    const DyadicRational a(BigInt(12), 4);
    EXPECT_EQ(a.numerator(), 3);
    EXPECT_EQ(a.exponent(), 2u);
    const DyadicRational z(BigInt(0), 7);
    EXPECT_EQ(z.exponent(), 0u);
    EXPECT_TRUE(z.is_zero());
}

TEST(DyadicRational, ArithmeticIsExact)
{
    std::mt19937_64 rng(15);
    std::uniform_int_distribution<long> num(-1000000, 1000000);
    std::uniform_int_distribution<int> ex(0, 40);
    for (int i = 0; i < 2000; ++i) {
        const DyadicRational a(BigInt(num(rng)), static_cast<std::uint64_t>(ex(rng)));
        const DyadicRational b(BigInt(num(rng)), static_cast<std::uint64_t>(ex(rng)));
        const auto ra = a.to_rational();
        const auto rb = b.to_rational();
        EXPECT_EQ((a + b).to_rational(), Rational(ra + rb));
        EXPECT_EQ((a - b).to_rational(), Rational(ra - rb));
        EXPECT_EQ((a * b).to_rational(), Rational(ra * rb));
        const long k = ex(rng) - 20;
        EXPECT_EQ(a.scaled(k).to_rational(), Rational(ra * oracle::pow2q(k)));
        if ((a.numerator() != 0) && (a.exponent() > 0)) {
            EXPECT_TRUE(mpz_odd_p((a + b - b).numerator().get_mpz_t()));
        }
    }
}

TEST(DyadicRational, Parsing)
{
    EXPECT_EQ(parse_dyadic("1/2^3").to_rational(), q(1, 8));
    EXPECT_EQ(parse_dyadic("-3/2^1").to_rational(), q(-3, 2));
    EXPECT_EQ(parse_dyadic("0.375").to_rational(), q(3, 8));
    EXPECT_EQ(parse_dyadic("5/8").to_rational(), q(5, 8));
    EXPECT_EQ(parse_dyadic("7").to_rational(), q(7));
    EXPECT_THROW(parse_dyadic("1/3"), std::invalid_argument);
    EXPECT_THROW(parse_dyadic("0.1"), std::invalid_argument);
    EXPECT_THROW(parse_dyadic("abc"), std::invalid_argument);
}

TEST(RationalParsing, RationalAndDecimal)
{
    EXPECT_EQ(parse_rational("1/2"), q(1, 2));
    EXPECT_EQ(parse_rational("6/4"), q(3, 2));
    EXPECT_THROW(parse_rational("0.5"), std::invalid_argument);
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_EQ(parse_decimal("1e-12"), Rational(1, mpz_class("1000000000000")));
    EXPECT_EQ(parse_decimal("0.25"), q(1, 4));
}

TEST(Enclosure, OutwardRoundingOnRandomRationals)
{
    std::mt19937_64 rng(16);
    for (int i = 0; i < 10000; ++i) {
        const auto a = oracle::random_rational(rng);
        auto b = oracle::random_rational(rng);
        const Enclosure ea(a);
        const Enclosure eb(b);
        ASSERT_TRUE(ea.contains(a));
        EXPECT_TRUE((ea + eb).contains(Rational(a + b)));
        EXPECT_TRUE((ea - eb).contains(Rational(a - b)));
        EXPECT_TRUE((ea * eb).contains(Rational(a * b)));
        if (b != 0) {
            EXPECT_TRUE((ea / eb).contains(Rational(a / b)));
        }
        EXPECT_TRUE(ea.abs().contains(abs(a)));
        EXPECT_TRUE(ea.pow(3).contains(Rational(a * a * a)));
    }
}

TEST(Enclosure, LowPrecisionStillContains)
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 2000; ++i) {
        const auto a = oracle::random_rational(rng);
        const auto b = oracle::random_rational(rng);
        const Enclosure ea(a, 8);
        const Enclosure eb(b, 8);
        EXPECT_TRUE((ea * eb + ea).contains(Rational(a * b + a)));
    }
}

TEST(Enclosure, ComparisonsAreCertain)
{
    const Enclosure third(q(1, 3));
    EXPECT_FALSE(third.is_point());
    EXPECT_TRUE(certainly_lt(third, Enclosure(q(1, 2))));
    EXPECT_FALSE(certainly_lt(third, third));
    EXPECT_TRUE(certainly_positive(third));
}

TEST(LambdaEnclosure, Examples)
{
    const auto l1 = lambda_enclosure(SeriesParams(q(1, 2), 2), 64);
    EXPECT_TRUE(l1.is_point());
    EXPECT_EQ(l1.lo_rational(), q(1, 4));

    const auto l2 = lambda_enclosure(SeriesParams(q(1, 8), 4), 64);
    EXPECT_TRUE(l2.is_point());
    EXPECT_EQ(l2.lo_rational(), q(1, 2));

    const auto l3 = lambda_enclosure(SeriesParams(q(1, 3), 1), 64);
    const double ref = oracle::exp2_high(q(-2, 3));
    EXPECT_LE(l3.lo_double(), ref);
    EXPECT_GE(l3.hi_double(), ref);
    EXPECT_NEAR(ref, 0.62996052494743658, 1e-16);
}

TEST(LambdaEnclosure, RelativeWidth)
{
    for (long p : {16L, 53L, 64L, 200L}) {
        const auto l = lambda_enclosure(SeriesParams(q(1, 3), 1), p);
        const Rational rel = l.width() / l.lo_rational();
        EXPECT_LE(rel, oracle::pow2q(1 - p)) << p;
        EXPECT_TRUE(certainly_positive(l));
        EXPECT_TRUE(certainly_lt(l, Enclosure(1L)));
    }
}

TEST(SeriesParams, RegimeAndValidation)
{
    EXPECT_TRUE(SeriesParams(q(1, 2), 2).improvable_regime());
    EXPECT_FALSE(SeriesParams(q(1, 2), 1).improvable_regime());
    EXPECT_TRUE(SeriesParams(q(1, 8), 4).improvable_regime());
    EXPECT_THROW(SeriesParams(q(0), 2), std::invalid_argument);
    EXPECT_THROW(SeriesParams(q(1), 2), std::invalid_argument);
    EXPECT_THROW(SeriesParams(q(1, 2), 0), std::invalid_argument);
}

TEST(LambdaPoly, Examples)
{
    const LambdaPoly zero{q(0)};
    EXPECT_TRUE(zero.is_zero());
    const auto z = lambdapoly_eval(zero, Enclosure(q(1, 4)));
    EXPECT_TRUE(z.is_point());
    EXPECT_EQ(z.lo_rational(), 0);

    const LambdaPoly p{q(1), q(1)};
    const auto v = lambdapoly_eval(p, Enclosure(q(1, 4)));
    EXPECT_TRUE(v.is_point());
    EXPECT_EQ(v.lo_rational(), q(5, 4));

    const LambdaPoly r{q(1, 2), q(-1, 3)};
    const auto lam = lambda_enclosure(SeriesParams(q(1, 3), 1), 128);
    const auto e = lambdapoly_eval(r, lam);
    const double expect = 0.5 - oracle::exp2_high(q(-2, 3)) / 3;
    EXPECT_LE(e.lo_double(), expect + 1e-16);
    EXPECT_GE(e.hi_double(), expect - 1e-16);
    EXPECT_LT(e.width(), q(1, 1000000));
}

TEST(LambdaPoly, TrimsTrailingZeros)
{
    const LambdaPoly p{q(1), q(0), q(0)};
    EXPECT_EQ(p.degree(), 0);
    const LambdaPoly a{q(1), q(2)};
    const LambdaPoly b{q(0), q(2)};
    EXPECT_EQ((a - b).degree(), 0);
}

TEST(LambdaPoly, EvalContainsRationalValue)
{
    std::mt19937_64 rng(18);
    for (int i = 0; i < 300; ++i) {
        std::vector<Rational> c;
        for (int k = 0; k < 6; ++k) {
            c.push_back(oracle::random_rational(rng, 5));
        }
        const LambdaPoly p(c);
        const auto lam = oracle::random_rational(rng, 1);
        EXPECT_TRUE(lambdapoly_eval(p, Enclosure(lam)).contains(p.evaluate(lam)));
    }
}
