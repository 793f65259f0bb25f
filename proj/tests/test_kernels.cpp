#include <gtest/gtest.h>

#include "blockshift_lab/kernels.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace bl = blockshift_lab;
using bl::cplx;
using bl::KernelSpec;

namespace {

std::vector<cplx> six_points() {
    return {{0.1, 0.2}, {-0.3, 0.1}, {0.5, -0.2}, {0.0, -0.6}, {-0.45, -0.35}, {0.25, 0.55}};
}

std::vector<double> radii(double lo, double hi, int count) {
    std::vector<double> r;
    for (int i = 0; i < count; ++i) r.push_back(lo + (hi - lo) * i / (count - 1));
    return r;
}

}  // namespace

TEST(KernelSpec, Coefficients) {
    const auto k2 = KernelSpec::lambda(2.0);
    for (std::size_t n = 0; n < 10; ++n) EXPECT_NEAR(k2.coefficient(n), static_cast<double>(n + 1), 1e-12);
    const auto g = KernelSpec::gamma(-1.0);
    EXPECT_NEAR(g.coefficient(3), 0.25, 1e-15);
    EXPECT_THROW(KernelSpec::table({1.0, -1.0}), bl::ConfigError);
    EXPECT_EQ(KernelSpec::table({1.0, 2.0}).coefficient(5), 0.0);
}

TEST(KernelSpec, DiagonalValues) {
    EXPECT_NEAR(bl::eval_kernel(KernelSpec::lambda(2.0), 0.5, 0.5).value.real(), 16.0 / 9.0, 1e-12);
    EXPECT_NEAR(bl::eval_kernel(KernelSpec::gamma(0.0), 0.5, 0.5).value.real(), 4.0 / 3.0, 1e-12);
}

TEST(KernelSpec, SeriesMatchesClosedFormWithinTailBound) {
    testgen::Gen g(51);
    for (int trial = 0; trial < 200; ++trial) {
        const double lam = g.uniform(0.3, 4.0);
        const cplx z = g.complex_modulus(0.0, 0.9), w = g.complex_modulus(0.0, 0.9);
        const auto k = bl::adapt_truncation(KernelSpec::lambda(lam), std::abs(z) * std::abs(w));
        const auto v = bl::eval_kernel(k, z, w);
        const cplx exact = std::pow(1.0 - z * std::conj(w), -lam);
        EXPECT_LT(std::abs(v.value - exact), 1e-11 * std::abs(exact));
        const auto coarse = bl::eval_kernel(KernelSpec::lambda(lam, 32), z, w);
        EXPECT_LE(std::abs(coarse.value - exact), coarse.tail_bound * (1.0 + 1e-9) + 1e-14);
    }
}

TEST(KernelSpec, DiscAndRadiusChecks) {
    const auto k = KernelSpec::lambda(1.0);
    EXPECT_THROW(bl::eval_kernel(k, 1.0, 0.0), bl::DomainError);
    EXPECT_THROW(bl::eval_kernel(k, 0.97, 0.0), bl::DomainError);
    EXPECT_NO_THROW(bl::eval_kernel(k, 0.97, 0.0, {0.99}));
}

TEST(KernelSpec, ProductIsPointwiseProduct) {
    const auto k0 = KernelSpec::lambda(1.5), k1 = KernelSpec::gamma(1.0);
    const auto p = KernelSpec::product(k0, k1);
    const cplx z(0.3, 0.2), w(-0.1, 0.4);
    const cplx expect = bl::eval_kernel(k0, z, w).value * bl::eval_kernel(k1, z, w).value;
    EXPECT_LT(std::abs(bl::eval_kernel(p, z, w).value - expect), 1e-12);
}

TEST(Mobius, PreservesDiscAndMatchesReference) {
    testgen::Gen g(52);
    for (int trial = 0; trial < 200; ++trial) {
        const double theta = g.uniform(-3.0, 3.0);
        const cplx a = g.complex_modulus(0.0, 0.95);
        const bl::MobiusMap phi(theta, a);
        const cplx z = g.complex_modulus(0.0, 0.999);
        const cplx fz = bl::mobius_apply(phi, z);
        EXPECT_LT(std::abs(fz), 1.0);
        EXPECT_LT(std::abs(fz - oracle_ref::mobius(theta, a, z)), 1e-13);
        EXPECT_LT(std::abs(bl::mobius_apply(bl::mobius_inverse(phi), fz) - z), 1e-12);
        const auto id = compose(phi, phi.inverse());
        EXPECT_LT(std::abs(id(z) - z), 1e-12);
    }
    EXPECT_THROW(bl::MobiusMap(0.0, 1.0), bl::ConfigError);
    EXPECT_THROW(bl::mobius_apply(bl::MobiusMap(0.0, 0.5), cplx(1.5, 0.0)), bl::DomainError);
}

TEST(Mobius, CompositionMatchesSequentialApplication) {
    const bl::MobiusMap f(0.7, cplx(0.2, -0.3)), g(-1.1, cplx(-0.5, 0.1));
    const auto fg = compose(f, g);
    for (cplx z : six_points()) EXPECT_LT(std::abs(fg(z) - f(g(z))), 1e-12);
}

TEST(Curvature, LambdaKernelsOnGrid) {
    double worst = 0.0;
    for (double lam : {0.5, 2.0}) {
        const auto k = KernelSpec::lambda(lam);
        for (double x = -0.8; x <= 0.8 + 1e-9; x += 0.2)
            for (double y = -0.8; y <= 0.8 + 1e-9; y += 0.2) {
                const cplx w(x, y);
                if (std::abs(w) > 0.8 + 1e-12) continue;
                worst = std::max(worst, std::abs(bl::curvature(k, w) - oracle_ref::lambda_curvature(lam, w)));
            }
    }
    EXPECT_LT(worst, 1e-6);
}

TEST(Curvature, ProductAddsParameters) {
    const auto p = KernelSpec::product(KernelSpec::lambda(1.0), KernelSpec::lambda(1.5));
    const cplx w(0.3, -0.2);
    EXPECT_NEAR(bl::curvature(p, w), oracle_ref::lambda_curvature(2.5, w), 1e-6);
    EXPECT_THROW(bl::curvature(KernelSpec::lambda(1.0), cplx(0.9999, 0.0)), bl::DomainError);
}

TEST(MatrixKernel, OrderZeroIsProductKernel) {
    const auto k0 = KernelSpec::lambda(1.0), k1 = KernelSpec::lambda(2.0);
    const auto j0 = bl::jk_kernel(k0, k1, 0);
    for (cplx z : six_points())
        for (cplx w : six_points()) {
            const cplx expect = bl::eval_kernel(k0, z, w).value * bl::eval_kernel(k1, z, w).value;
            EXPECT_LT(std::abs(j0(z, w)(0, 0) - expect), 1e-12);
        }
}

TEST(MatrixKernel, DerivativeMatchesClosedForm) {
    // d/dz d/dconj(w) (1 - z conj w)^-2 = 2(1 + 2 z conj w)(1 - z conj w)^-4
    const auto k = KernelSpec::lambda(2.0);
    const cplx z(0.2, 0.1), w(-0.3, 0.25);
    const cplx u = z * std::conj(w);
    EXPECT_LT(std::abs(bl::kernel_derivative(k, 1, 1, z, w) - 2.0 * (1.0 + 2.0 * u) / std::pow(1.0 - u, 4)), 1e-12);
}

TEST(MatrixKernel, SampledGramsArePositive) {
    const auto g1 = bl::sampled_gram(bl::jk_kernel(KernelSpec::lambda(1.0), KernelSpec::lambda(1.0), 1), six_points());
    EXPECT_TRUE(g1.nonnegative);
    EXPECT_GE(g1.min_eigenvalue, -1e-9);
    EXPECT_LT(g1.hermitian_residual, 1e-12);
    const auto g2 = bl::sampled_gram(bl::jk_kernel(KernelSpec::lambda(1.0), KernelSpec::lambda(2.0), 2), six_points());
    EXPECT_GE(g2.min_eigenvalue, -1e-9);
    EXPECT_EQ(g2.gram.rows(), 18);
    EXPECT_THROW(bl::jk_kernel(KernelSpec::lambda(1.0), KernelSpec::lambda(1.0), 5), bl::ConfigError);
}

TEST(MatrixKernel, TruncationCheckFires) {
    const auto j = bl::jk_kernel(KernelSpec::lambda(1.0, 16), KernelSpec::lambda(2.0, 16), 1);
    EXPECT_THROW(j(cplx(0.9, 0.0), cplx(0.9, 0.0), {0.95}), bl::DomainError);
}

TEST(Multiplier, CoordinateIsContractiveOnHardySpace) {
    const auto g = bl::multiplier_bound_witness(KernelSpec::lambda(1.0), bl::CoordinateMultiplier{}, 1.0, six_points());
    EXPECT_TRUE(g.nonnegative);
}

TEST(Multiplier, BoundBelowSupremumFails) {
    // |phi(z0)| = 0.6 > c = 0.5 forces a negative diagonal entry
    const std::vector<cplx> pts{{0.6, 0.0}, {-0.1, 0.2}};
    const auto g = bl::multiplier_bound_witness(KernelSpec::lambda(1.0), bl::CoordinateMultiplier{}, 0.5, pts);
    EXPECT_FALSE(g.nonnegative);
    const auto m = bl::multiplier_bound_witness(KernelSpec::lambda(2.0), bl::MobiusMap(0.4, cplx(0.3, 0.1)), 1.0,
                                                six_points());
    EXPECT_TRUE(m.nonnegative);
    EXPECT_THROW(bl::multiplier_bound_witness(KernelSpec::lambda(1.0), bl::ConstantMultiplier{1.0}, 0.0, pts),
                 bl::ConfigError);
}

TEST(RatioProfile, LimitClasses) {
    const auto r = radii(0.1, 0.99, 60);
    EXPECT_EQ(bl::kernel_ratio_profile(KernelSpec::lambda(2.0), KernelSpec::lambda(1.0), r).limit_class,
              bl::LimitClass::infinity);
    EXPECT_EQ(bl::kernel_ratio_profile(KernelSpec::lambda(1.0), KernelSpec::lambda(3.0), r).limit_class,
              bl::LimitClass::zero);
    const auto same = bl::kernel_ratio_profile(KernelSpec::gamma(1.0), KernelSpec::lambda(2.0), r);
    EXPECT_EQ(same.limit_class, bl::LimitClass::bounded);
    for (double v : same.values) EXPECT_NEAR(v, 1.0, 1e-12);
    const auto exp = bl::kernel_ratio_profile(KernelSpec::lambda(3.0), KernelSpec::lambda(1.0), r);
    EXPECT_NEAR(exp.exponent, 2.0, 0.05);
}

TEST(RatioProfile, RadiiValidation) {
    const auto k = KernelSpec::lambda(1.0);
    EXPECT_THROW(bl::kernel_ratio_profile(k, k, {0.1, 0.2, 0.3}), bl::ConfigError);
    EXPECT_THROW(bl::kernel_ratio_profile(k, k, {0.1, 0.3, 0.2, 0.4}), bl::ConfigError);
    EXPECT_THROW(bl::kernel_ratio_profile(k, k, {0.1, 0.2, 0.3, 1.0}), bl::ConfigError);
}

TEST(BoundaryLimits, GammaMinusOne) {
    const auto rep = bl::boundary_limit_scan(KernelSpec::gamma(-1.0), {0.5, 1.0, 2.0, 3.0}, radii(0.1, 0.99, 60));
    EXPECT_TRUE(rep.holds);
    for (const auto& e : rep.entries) {
        EXPECT_EQ(e.quotient_class, bl::LimitClass::zero);
        EXPECT_EQ(e.product_class, bl::LimitClass::infinity);
    }
    // K^(1) itself has a bounded quotient at lambda = 1
    EXPECT_FALSE(bl::boundary_limit_scan(KernelSpec::lambda(1.0), {1.0}, radii(0.1, 0.99, 60)).holds);
}

TEST(MetricDet, ClosedFormForHardyAgainstK2) {
    // mu = 1, K1 = K^(2), x = 1: ratio = 1 / (1 - |w|^2)
    const auto k1 = bl::adapt_truncation(KernelSpec::lambda(2.0), 0.81);
    for (double r : {0.0, 0.3, 0.6, 0.9}) {
        const auto m = bl::metric_det_ratio(1.0, k1, bl::seq::constant(1.0), cplx(r, 0.0));
        EXPECT_NEAR(m.ratio, 1.0 / (1.0 - r * r), 1e-9 / (1.0 - r * r));
    }
}

TEST(MetricDet, ZeroMultiplierAndOperatorNormBound) {
    const auto k1 = KernelSpec::lambda(1.0, 2048);
    const auto zero = bl::metric_det_ratio(2.0, k1, bl::seq::constant(0.0), cplx(0.5, 0.2));
    EXPECT_NEAR(zero.ratio, 1.0, 1e-12);
    testgen::Gen g(53);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = g.weight_table(0, 2048);
        const auto m = bl::metric_det_ratio(2.0, k1, x, g.complex_modulus(0.0, 0.9));
        EXPECT_GE(m.ratio, 1.0 - 1e-9);
        EXPECT_LE(m.ratio, 1.0 + m.operator_norm_sq + 1e-9);
    }
}

TEST(MatrixKernel, DerivativesAtOrigin) {
    // d^i dbar^j of (1 - z conj w)^{-lambda} at z = w = 0 is i! (lambda)_i when i = j
    const auto k = KernelSpec::lambda(2.0);
    EXPECT_NEAR(std::abs(bl::kernel_derivative(k, 0, 0, 0.0, 0.0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(bl::kernel_derivative(k, 1, 1, 0.0, 0.0) - 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(bl::kernel_derivative(k, 2, 2, 0.0, 0.0) - 12.0), 0.0, 1e-15);
    EXPECT_EQ(bl::kernel_derivative(k, 1, 2, 0.0, 0.0), cplx(0.0));
    const auto g = bl::sampled_gram(bl::jk_kernel(KernelSpec::lambda(1.0), k, 2), {0.0, cplx(0.3, 0.2)});
    EXPECT_TRUE(std::isfinite(g.min_eigenvalue));
    EXPECT_TRUE(g.nonnegative);
}
