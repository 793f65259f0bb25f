#include <gtest/gtest.h>

#include "blockshift_lab/blockshift.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace bl = blockshift_lab;
using bl::cplx;
namespace seq = bl::seq;

namespace {

bl::BlockShiftSpec one_parameter_example() {
    return bl::BlockShiftSpec::td(seq::sqrt_abs_quotient(seq::affine(0.3), seq::affine(0.7)), seq::constant(1.0));
}

bl::BlockShiftSpec unimodular_example() {
    return bl::BlockShiftSpec::td(seq::mobius_rational(0.5, 0.5, cplx(0.0, 1.0)), seq::constant(1.0));
}

}  // namespace

TEST(LocalBlock, MatchesReferenceBlockAndGram) {
    testgen::Gen g;
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = g.general(-5, 5);
        for (bl::Index n = -4; n <= 4; ++n) {
            const auto ref = oracle_ref::block(s.w, s.v, s.d, n);
            const auto lb = bl::local_block(s, n).m;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) EXPECT_LT(std::abs(lb(i, j) - ref[i][j]), 1e-14);
            const auto gr = oracle_ref::gram(s.w, s.v, s.d, n);
            const auto gp = bl::local_gram(s, n);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    EXPECT_LT(std::abs(gp.A(i, j) - gr.A[i][j]), 1e-12);
                    EXPECT_LT(std::abs(gp.B(i, j) - gr.B[i][j]), 1e-12);
                }
            EXPECT_NEAR(bl::trace_A(s, n), (gr.A[0][0] + gr.A[1][1]).real(), 1e-12);
        }
    }
}

TEST(LocalBlock, UnitDeterminantForOneParameterClass) {
    testgen::Gen g(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = g.class_td(-3, 3);
        for (bl::Index n = -2; n <= 2; ++n) {
            const auto gr = oracle_ref::gram(s.w, s.v, s.d, n);
            EXPECT_NEAR(std::abs(oracle_ref::det(gr.A) - 1.0), 0.0, 1e-12);
        }
    }
}

TEST(LocalBlock, EigenPairFromTrace) {
    // choose |t|^2 + 1/|t|^2 = 6.5 with zero coupling (d = 0)
    const double x = (6.5 + std::sqrt(6.5 * 6.5 - 4.0)) / 2.0;
    const auto s = bl::BlockShiftSpec::td(seq::constant(std::sqrt(x)), seq::constant(0.0));
    EXPECT_NEAR(bl::trace_A(s, 0), 6.5, 1e-13);
    EXPECT_NEAR(bl::eigen_pair(s, 0), 2.518398145491146, 1e-13);
    const auto [s1, s2] = bl::singular_values(s, 0);
    EXPECT_NEAR(s1, 2.518398145491146, 1e-13);
    EXPECT_NEAR(s2, 0.3970778019315039, 1e-13);
}

TEST(LocalBlock, EigenPairRejectsNonUnitDeterminantAndIdentity) {
    const bl::BlockShiftSpec s{seq::constant(2.0), seq::constant(2.0), seq::constant(1.0)};
    EXPECT_THROW(bl::eigen_pair(s, 0), bl::InapplicableError);
    const auto ident = bl::BlockShiftSpec::td(seq::constant(1.0), seq::constant(1.0));
    EXPECT_THROW(bl::eigen_pair(ident, 0), bl::InapplicableError);
}

TEST(LocalBlock, SingularValuesMatchSvd) {
    testgen::Gen g(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = g.general(-2, 2);
        const auto [s1, s2] = bl::singular_values(s, 0);
        Eigen::JacobiSVD<bl::Mat2> svd(bl::local_block(s, 0).m);
        EXPECT_NEAR(s1, svd.singularValues()(0), 1e-12);
        EXPECT_NEAR(s2, svd.singularValues()(1), 1e-12);
    }
}

TEST(Intertwining, DetectsDiagonalDirectSum) {
    const bl::BlockShiftSpec same{seq::constant(2.0), seq::constant(2.0), seq::constant(3.0)};
    EXPECT_TRUE(bl::check_intertwining(same, bl::Window(-5, 5)).degenerate);
    const auto rep = bl::check_intertwining(one_parameter_example(), bl::Window(-5, 5));
    EXPECT_FALSE(rep.degenerate);
    EXPECT_TRUE(rep.witness.has_value());
    const bl::BlockShiftSpec zero{seq::table({{0, 0.0}}, cplx(1.0)), seq::constant(1.0), seq::constant(1.0)};
    EXPECT_THROW(bl::check_intertwining(zero, bl::Window(-1, 1)), bl::DomainError);
}

TEST(Truncation, HardPlacesBlocksBelowDiagonal) {
    testgen::Gen g(3);
    const auto s = g.general(-6, 6);
    const bl::Window win(-3, 3);
    const auto op = bl::truncate(s, win, bl::TruncationMode::hard);
    ASSERT_EQ(op.m.rows(), 14);
    for (bl::Index n = -3; n < 3; ++n) {
        const auto ref = oracle_ref::block(s.w, s.v, s.d, n);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) EXPECT_EQ(op.m(op.position(n + 1, i), op.position(n, j)), ref[i][j]);
    }
    // the last index maps out of the window
    EXPECT_EQ(op.m.block(0, op.position(3, 0), 14, 2).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(op.index_map[5].n, -1);
    EXPECT_EQ(op.index_map[5].component, 1);
}

TEST(Truncation, CirculantRequiresPeriodicity) {
    const auto periodic = bl::BlockShiftSpec::td(seq::periodic({1.0, 2.0}), seq::constant(1.0));
    const auto op = bl::truncate(periodic, bl::Window(0, 3), bl::TruncationMode::circulant);
    EXPECT_NE(op.m.block(0, op.position(3, 0), 2, 2).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(bl::truncate(periodic, bl::Window(0, 2), bl::TruncationMode::circulant), bl::ConfigError);
    EXPECT_THROW(bl::truncate(one_parameter_example(), bl::Window(0, 3), bl::TruncationMode::circulant),
                 bl::ConfigError);
    const auto m = bl::truncate_shift(seq::periodic({1.0, 2.0}), bl::Window(0, 3), bl::TruncationMode::circulant);
    EXPECT_EQ(m(0, 3), cplx(2.0));
    EXPECT_EQ(m(1, 0), cplx(1.0));
}

TEST(Pairing, ReflectionOneHoldsForOddNegationExample) {
    const auto rep = bl::trace_pairing(one_parameter_example(), bl::PairingMap::reflection(1), bl::Window(-40, 40));
    EXPECT_TRUE(rep.holds);
    ASSERT_TRUE(rep.exclusive.has_value());
    EXPECT_TRUE(*rep.exclusive);
    EXPECT_LE(rep.max_deviation, 1e-10);
    EXPECT_EQ(rep.skipped, 1);  // n = 40 maps to -41
}

TEST(Pairing, UnimodularExampleReflectsAboutMinusOneHalf) {
    const auto rep = bl::trace_pairing(unimodular_example(), bl::PairingMap::reflection(1), bl::Window(-40, 40));
    EXPECT_TRUE(rep.holds);
    const auto found = bl::find_reflection(unimodular_example(), bl::Window(-20, 20));
    ASSERT_TRUE(found.i0.has_value());
    EXPECT_EQ(*found.i0, 1);
}

TEST(Pairing, WrongReflectionFailsAndCollisionsAreReported) {
    const auto rep = bl::trace_pairing(one_parameter_example(), bl::PairingMap::reflection(2), bl::Window(-10, 10));
    EXPECT_FALSE(rep.holds);
    ASSERT_TRUE(rep.first_failure.has_value());
    EXPECT_FALSE(*rep.exclusive);
    EXPECT_FALSE(rep.collisions.empty());
}

TEST(Pairing, ParityShiftedExampleFindsReflectionTwo) {
    // x_n = n + 1.3, y_n = n + 0.7 satisfy x_n = -y_{-(n+2)}
    const auto s = bl::BlockShiftSpec::td(seq::sqrt_abs_quotient(seq::affine(1.3), seq::affine(0.7)), seq::constant(1.0));
    const auto found = bl::find_reflection(s, bl::Window(-20, 20));
    ASSERT_TRUE(found.i0.has_value());
    EXPECT_EQ(*found.i0, 2);
}

TEST(Pairing, TableAndIdentityMaps) {
    const auto s = one_parameter_example();
    EXPECT_TRUE(bl::trace_pairing(s, bl::PairingMap::identity(), bl::Window(-3, 3)).holds);
    const auto t = bl::PairingMap::table({{0, -1}, {2, -3}});
    const auto rep = bl::trace_pairing(s, t, bl::Window(-5, 5));
    EXPECT_TRUE(rep.holds);
    EXPECT_EQ(rep.pairs.size(), 2u);
    EXPECT_FALSE(rep.exclusive.has_value());
    EXPECT_EQ(t.describe(), "table");
}
