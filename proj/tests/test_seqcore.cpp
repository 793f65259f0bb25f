#include <gtest/gtest.h>

#include "blockshift_lab/seqcore.hpp"

namespace bl = blockshift_lab;
using bl::cplx;
namespace seq = bl::seq;

TEST(Sequences, ConstantAndPolynomial) {
    EXPECT_EQ(seq::constant(cplx(2.0, -1.0))(17), cplx(2.0, -1.0));
    const auto p = seq::polynomial({1.0, 0.0, 1.0});
    EXPECT_EQ(p(-3), cplx(10.0));
    EXPECT_EQ(seq::affine(0.3)(2), cplx(2.3));
}

TEST(Sequences, TableFallbackAndMissingIndex) {
    const auto t = seq::table({{0, 5.0}, {-1, 7.0}});
    EXPECT_EQ(t(-1), cplx(7.0));
    try {
        t(3);
        FAIL() << "expected DomainError";
    } catch (const bl::DomainError& e) {
        ASSERT_TRUE(e.index().has_value());
        EXPECT_EQ(*e.index(), 3);
    }
    EXPECT_EQ(seq::table({{0, 5.0}}, cplx(9.0))(4), cplx(9.0));
}

TEST(Sequences, MobiusRationalAtZero) {
    const auto m = seq::mobius_rational(0.5, 0.5, cplx(0.0, 1.0));
    const cplx v = m(0);
    EXPECT_NEAR(v.real(), -0.6, 1e-15);
    EXPECT_NEAR(v.imag(), 0.8, 1e-15);
}

TEST(Sequences, MobiusRationalUnimodularForImaginaryParameter) {
    for (double s : {0.3, 1.0, 2.5}) {
        const auto m = seq::mobius_rational(0.5, 0.5, cplx(0.0, s));
        for (bl::Index n = -50; n <= 50; ++n) EXPECT_NEAR(std::abs(m(n)), 1.0, 1e-12) << "n=" << n;
    }
}

TEST(Sequences, SqrtRatioValueAndDomain) {
    EXPECT_DOUBLE_EQ(seq::sqrt_ratio(0.25, 0.75)(1).real(), 0.8451542547285166);
    const auto s = seq::sqrt_ratio(0.3, 0.7);
    EXPECT_THROW(s(-1), bl::DomainError);
    EXPECT_NO_THROW(s(0));
}

TEST(Sequences, PeriodicWrapsNegativeIndices) {
    const auto p = seq::periodic({1.0, 3.0});
    const auto vals = bl::window_values(p, bl::Window(0, 3));
    ASSERT_EQ(vals.size(), 4u);
    EXPECT_EQ(vals[0], cplx(1.0));
    EXPECT_EQ(vals[1], cplx(3.0));
    EXPECT_EQ(vals[2], cplx(1.0));
    EXPECT_EQ(vals[3], cplx(3.0));
    EXPECT_EQ(p(-1), cplx(3.0));
    EXPECT_EQ(p(-2), cplx(1.0));
    EXPECT_THROW(seq::periodic({}), bl::ConfigError);
}

TEST(Sequences, NegatedShiftedReflection) {
    const auto r = seq::negated_shifted_reflection(seq::table({{0, 5.0}, {-1, 7.0}}), 1);
    EXPECT_EQ(r(0), cplx(-7.0));
    EXPECT_EQ(r(-1), cplx(-5.0));
}

TEST(Sequences, ReciprocalRejectsZero) {
    const auto r = seq::reciprocal_of(seq::affine(0.0));
    EXPECT_EQ(r(4), cplx(0.25));
    EXPECT_THROW(r(0), bl::DomainError);
}

TEST(Sequences, SqrtAbsQuotientOddNegation) {
    // x_n = n + 0.3, y_n = n + 0.7 satisfy x_n = -y_{-(n+1)}
    const auto x = seq::affine(0.3), y = seq::affine(0.7);
    const auto t = seq::sqrt_abs_quotient(x, y);
    for (bl::Index n = -20; n <= 20; ++n) {
        EXPECT_NEAR(x(n).real(), -y(-(n + 1)).real(), 1e-15);
        EXPECT_NEAR(t(n).real() * t(-(n + 1)).real(), 1.0, 1e-14);
    }
}

TEST(Sequences, WindowValuesReportsFailingIndex) {
    try {
        bl::window_values(seq::sqrt_ratio(0.3, 0.7), bl::Window(-3, 3));
        FAIL() << "expected DomainError";
    } catch (const bl::DomainError& e) {
        ASSERT_TRUE(e.index().has_value());
        EXPECT_EQ(*e.index(), -3);
    }
}

TEST(Sequences, StructuralEquality) {
    const auto a = seq::reciprocal_of(seq::affine(0.2));
    const auto b = seq::reciprocal_of(seq::affine(0.2));
    const auto c = seq::reciprocal_of(seq::affine(0.3));
    EXPECT_TRUE(bl::structurally_equal(a, b));
    EXPECT_FALSE(bl::structurally_equal(a, c));
    EXPECT_EQ(bl::constant_value(seq::constant(2.0)), cplx(2.0));
    EXPECT_FALSE(bl::constant_value(a).has_value());
}

TEST(Periodicity, DetectsSmallestModulusPeriod) {
    const auto r = bl::is_modulus_periodic(seq::periodic({1.0, 2.0, cplx(0.0, 1.0)}), bl::Window(-10, 10));
    EXPECT_TRUE(r.applicable);
    EXPECT_TRUE(r.periodic);
    EXPECT_EQ(r.period, 3);
    const auto sign = bl::is_modulus_periodic(seq::periodic({1.0, -1.0}), bl::Window(-10, 10));
    EXPECT_EQ(sign.period, 1);  // values alternate, moduli do not
    const auto c = bl::is_modulus_periodic(seq::constant(3.0), bl::Window(0, 9));
    EXPECT_TRUE(c.periodic);
    EXPECT_EQ(c.period, 1);
}

TEST(Periodicity, AperiodicAndShortWindows) {
    EXPECT_FALSE(bl::is_modulus_periodic(seq::affine(0.5), bl::Window(0, 20)).periodic);
    EXPECT_FALSE(bl::is_modulus_periodic(seq::constant(1.0), bl::Window(0, 2)).applicable);
    EXPECT_TRUE(bl::has_value_period(seq::periodic({1.0, 2.0}), bl::Window(0, 7), 2));
    EXPECT_FALSE(bl::has_value_period(seq::periodic({1.0, 2.0}), bl::Window(0, 7), 3));
}

TEST(Decay, ConfigAndSlope) {
    const auto w = seq::product(seq::constant(0.5), seq::sqrt_ratio(0.3, 0.7));
    const auto v = seq::sqrt_ratio(0.2, 0.8);
    EXPECT_THROW(bl::ratio_product_decay(w, v, 0, 0, 7), bl::ConfigError);
    const auto r = bl::ratio_product_decay(w, v, 0, 0, 64);
    EXPECT_TRUE(r.decays);
    EXPECT_LT(r.log_slope, std::log(0.5) + 0.05);
    const auto flat = bl::ratio_product_decay(seq::constant(1.0), seq::constant(1.0), 0, 0, 64);
    EXPECT_FALSE(flat.decays);
    EXPECT_THROW(bl::ratio_product_decay(seq::constant(0.0), seq::constant(1.0), 0, 0, 16), bl::DomainError);
}

TEST(Decay, RegressionSlopeOfLine) {
    EXPECT_NEAR(bl::detail::regression_slope({1.0, 3.0, 5.0, 7.0}), 2.0, 1e-14);
}
