#ifndef BLOCKSHIFT_LAB_KERNELS_HPP
#define BLOCKSHIFT_LAB_KERNELS_HPP

// Diagonal power-series reproducing kernels K(z,w) = sum a_n z^n conj(w)^n on the
// unit disc, Mobius maps, curvature by finite differences, J_k matrix kernels,
// multiplier witnesses, radial ratio profiles and the metric determinant of
// the 2x2 upper triangular model.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "blockshift_lab/seqcore.hpp"
#include "blockshift_lab/types.hpp"

namespace blockshift_lab {

inline constexpr std::size_t default_truncation = 256;

class KernelSpec {
public:
    enum class Kind { lambda, gamma, table, product };

    /// (1 - z conj(w))^{-lambda}: a_n = prod_{j<n} (lambda + j) / n!
    static KernelSpec lambda(double lam, std::size_t truncation = default_truncation) {
        if (!(lam > 0.0)) throw ConfigError("lambda kernel: lambda must be > 0");
        KernelSpec k(Kind::lambda, lam, truncation);
        k.coeffs_[0] = 1.0;
        for (std::size_t n = 1; n <= truncation; ++n)
            k.coeffs_[n] = k.coeffs_[n - 1] * (lam + static_cast<double>(n) - 1.0) / static_cast<double>(n);
        return k;
    }

    /// a_n = (n + 1)^gamma
    static KernelSpec gamma(double g, std::size_t truncation = default_truncation) {
        KernelSpec k(Kind::gamma, g, truncation);
        for (std::size_t n = 0; n <= truncation; ++n) k.coeffs_[n] = std::pow(static_cast<double>(n + 1), g);
        return k;
    }

    /// Finite coefficient list; a_n = 0 beyond it.
    static KernelSpec table(std::vector<double> values, std::optional<std::size_t> truncation = std::nullopt) {
        if (values.empty()) throw ConfigError("table kernel: empty coefficient list");
        for (double a : values)
            if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("table kernel: coefficients must be finite and >= 0");
        const std::size_t n = truncation.value_or(values.size() - 1);
        KernelSpec k(Kind::table, 0.0, n);
        for (std::size_t i = 0; i < values.size() && i <= n; ++i) k.coeffs_[i] = values[i];
        k.table_ = std::move(values);
        return k;
    }

    /// Pointwise product K0 K1: Cauchy convolution of coefficients.
    static KernelSpec product(const KernelSpec& k0, const KernelSpec& k1,
                              std::optional<std::size_t> truncation = std::nullopt) {
        const std::size_t n = truncation.value_or(std::min(k0.truncation(), k1.truncation()));
        KernelSpec k(Kind::product, 0.0, n);
        k.left_ = std::make_shared<const KernelSpec>(k0.with_truncation(n));
        k.right_ = std::make_shared<const KernelSpec>(k1.with_truncation(n));
        const auto& a = k.left_->coeffs_;
        const auto& b = k.right_->coeffs_;
        for (std::size_t m = 0; m <= n; ++m) {
            double acc = 0.0;
            for (std::size_t j = 0; j <= m; ++j) acc += a[j] * b[m - j];
            k.coeffs_[m] = acc;
        }
        return k;
    }

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }
    const std::vector<double>& table_values() const noexcept { return table_; }
    const KernelSpec& left() const { return *left_; }
    const KernelSpec& right() const { return *right_; }
    std::size_t truncation() const noexcept { return coeffs_.size() - 1; }
    const std::vector<double>& coefficients() const noexcept { return coeffs_; }
    double coefficient(std::size_t n) const { return n < coeffs_.size() ? coeffs_[n] : 0.0; }

    KernelSpec with_truncation(std::size_t n) const {
        switch (kind_) {
        case Kind::lambda: return lambda(param_, n);
        case Kind::gamma: return gamma(param_, n);
        case Kind::table: return table(table_, n);
        case Kind::product: return product(*left_, *right_, n);
        }
        throw ConfigError("unknown kernel kind");
    }

    /// Truncated real series sum_{n<=N} a_n s^n.
    double partial_sum(double s) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
        return acc;
    }

    /// Upper bound for sum_{n>N} a_n s^n, s >= 0 (infinite when no bound is available).
    double tail_bound(double s) const {
        const std::size_t n = truncation();
        switch (kind_) {
        case Kind::table:
            return table_.size() <= n + 1 ? 0.0 : std::numeric_limits<double>::infinity();
        case Kind::lambda:
        case Kind::gamma: {
            // the coefficient ratio a_{n+1}/a_n is monotone and tends to 1, so
            // max(1, a_N/a_{N-1}) bounds it from N on
            const double rho = n == 0 ? std::max(1.0, param_) : std::max(1.0, coeffs_[n] / coeffs_[n - 1]);
            if (rho * s >= 1.0) return std::numeric_limits<double>::infinity();
            return coeffs_[n] * std::pow(s, static_cast<double>(n + 1)) * rho / (1.0 - rho * s);
        }
        case Kind::product: {
            const double p0 = left_->partial_sum(s);
            const double p1 = right_->partial_sum(s);
            return std::max(0.0, (p0 + left_->tail_bound(s)) * (p1 + right_->tail_bound(s)) - partial_sum(s));
        }
        }
        return std::numeric_limits<double>::infinity();
    }

    std::string describe() const {
        switch (kind_) {
        case Kind::lambda: return "K^(" + std::to_string(param_) + ")";
        case Kind::gamma: return "K_(" + std::to_string(param_) + ")";
        case Kind::table: return "table[" + std::to_string(table_.size()) + "]";
        case Kind::product: return left_->describe() + "*" + right_->describe();
        }
        return "?";
    }

private:
    KernelSpec(Kind kind, double param, std::size_t truncation)
        : kind_(kind), param_(param), coeffs_(truncation + 1, 0.0) {}

    Kind kind_;
    double param_;
    std::vector<double> coeffs_;
    std::vector<double> table_;
    std::shared_ptr<const KernelSpec> left_;
    std::shared_ptr<const KernelSpec> right_;
};

struct EvalOptions {
    double radius_limit = 0.95;
};

struct KernelValue {
    cplx value;
    double tail_bound;
    std::optional<cplx> closed_form;  // lambda kernels only
};

namespace detail {

inline void require_in_disc(cplx z, double radius_limit, const char* what) {
    if (std::abs(z) >= 1.0) throw DomainError(std::string(what) + ": point outside the open unit disc");
    if (std::abs(z) > radius_limit)
        throw DomainError(std::string(what) + ": |point| exceeds configured radius " + std::to_string(radius_limit));
}

}  // namespace detail

inline KernelValue eval_kernel(const KernelSpec& k, cplx z, cplx w, const EvalOptions& opt = {}) {
    detail::require_in_disc(z, opt.radius_limit, "eval_kernel");
    detail::require_in_disc(w, opt.radius_limit, "eval_kernel");
    const cplx u = z * std::conj(w);
    cplx acc = 0.0;
    const auto& a = k.coefficients();
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * u + *it;
    KernelValue out{acc, k.tail_bound(std::abs(u)), std::nullopt};
    if (k.kind() == KernelSpec::Kind::lambda) out.closed_form = std::pow(1.0 - u, -k.parameter());
    return out;
}

/// Smallest doubling of the truncation with tail(s_max) <= rel_tol * K(s_max), capped at n_cap.
inline KernelSpec adapt_truncation(const KernelSpec& k, double s_max, double rel_tol = 1e-12,
                                   std::size_t n_cap = 1u << 14) {
    KernelSpec cur = k;
    while (cur.tail_bound(s_max) > rel_tol * cur.partial_sum(s_max)) {
        const std::size_t next = cur.truncation() * 2;
        if (next > n_cap)
            throw DomainError("kernel truncation insufficient at s=" + std::to_string(s_max) + " (cap " +
                              std::to_string(n_cap) + ")");
        cur = cur.with_truncation(next);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Mobius maps phi(z) = e^{i theta} (z - a) / (1 - conj(a) z)
// ---------------------------------------------------------------------------

class MobiusMap {
public:
    MobiusMap(double theta = 0.0, cplx a = 0.0) : theta_(theta), a_(a) {
        if (!(std::abs(a) < 1.0)) throw ConfigError("mobius map: |a| must be < 1");
    }

    double theta() const noexcept { return theta_; }
    cplx a() const noexcept { return a_; }

    cplx operator()(cplx z) const {
        if (std::abs(z) > 1.0) throw DomainError("mobius_apply: |z| > 1");
        const cplx den = 1.0 - std::conj(a_) * z;
        if (den == cplx(0.0)) throw DomainError("mobius_apply: pole");
        return std::polar(1.0, theta_) * (z - a_) / den;
    }

    MobiusMap inverse() const { return MobiusMap(-theta_, -a_ * std::polar(1.0, theta_)); }

    /// Matrix [[e^{i theta}, -e^{i theta} a], [-conj(a), 1]] acting by linear fractions.
    Eigen::Matrix2cd matrix() const {
        const cplx e = std::polar(1.0, theta_);
        Eigen::Matrix2cd m;
        m << e, -e * a_, -std::conj(a_), 1.0;
        return m;
    }

    static MobiusMap from_matrix(const Eigen::Matrix2cd& m) {
        const cplx s = m(1, 1);
        if (s == cplx(0.0)) throw DomainError("mobius compose: degenerate matrix");
        return MobiusMap(std::arg(m(0, 0) / s), -std::conj(m(1, 0) / s));
    }

    friend MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner) {
        return from_matrix(outer.matrix() * inner.matrix());
    }

private:
    double theta_;
    cplx a_;
};

inline cplx mobius_apply(const MobiusMap& phi, cplx z) { return phi(z); }
inline MobiusMap mobius_inverse(const MobiusMap& phi) { return phi.inverse(); }

// ---------------------------------------------------------------------------
// Curvature
// ---------------------------------------------------------------------------

struct CurvatureOptions {
    double h = 1e-3;
};

namespace detail {

inline long double log_kernel_diag(const KernelSpec& k, long double x, long double y) {
    const long double s = x * x + y * y;
    long double acc = 0.0L;
    const auto& a = k.coefficients();
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * s + static_cast<long double>(*it);
    return std::log(acc);
}

/// Compact 9-point Laplacian of log K(w,w) at (x, y) with step h.
inline long double laplacian9(const KernelSpec& k, long double x, long double y, long double h) {
    auto f = [&](int i, int j) { return log_kernel_diag(k, x + i * h, y + j * h); };
    const long double edges = f(1, 0) + f(-1, 0) + f(0, 1) + f(0, -1);
    const long double corners = f(1, 1) + f(1, -1) + f(-1, 1) + f(-1, -1);
    return (4.0L * edges + corners - 20.0L * f(0, 0)) / (6.0L * h * h);
}

}  // namespace detail

/// -d^2/(dw d conj w) log K(w,w), i.e. -Laplacian/4, from 9-point differences at
/// steps h and 2h combined by one Richardson step.
inline double curvature(const KernelSpec& k, cplx w, const CurvatureOptions& opt = {}) {
    const double h = opt.h;
    if (!(h > 1e-8)) throw ConfigError("curvature: step too small");
    // farthest stencil point at step 2h lies 2h*sqrt(2) away
    if (std::abs(w) + 2.0 * std::sqrt(2.0) * h >= 1.0) throw DomainError("curvature: stencil leaves the disc");
    const long double x = w.real();
    const long double y = w.imag();
    const long double d1 = detail::laplacian9(k, x, y, h);
    const long double d2 = detail::laplacian9(k, x, y, 2.0L * h);
    const long double lap = (4.0L * d1 - d2) / 3.0L;
    return static_cast<double>(-lap / 4.0L);
}

// ---------------------------------------------------------------------------
// J_k kernels: entry (i,j) is K0(z,w) d^i dbar^j K1(z,w)
// ---------------------------------------------------------------------------

namespace detail {

/// z^n by repeated squaring; ipow(0, 0) = 1, unlike std::pow on complex
inline cplx ipow(cplx z, std::size_t n) {
    cplx r = 1.0;
    while (n > 0) {
        if (n & 1u) r *= z;
        z *= z;
        n >>= 1u;
    }
    return r;
}

/// n! / (n - i)!
inline double falling(std::size_t n, std::size_t i) {
    double r = 1.0;
    for (std::size_t m = 0; m < i; ++m) r *= static_cast<double>(n - m);
    return r;
}

}  // namespace detail

/// Termwise derivative sum_n a_n (n)_i (n)_j z^{n-i} conj(w)^{n-j}.
inline cplx kernel_derivative(const KernelSpec& k, std::size_t i, std::size_t j, cplx z, cplx w) {
    const auto& a = k.coefficients();
    const cplx wb = std::conj(w);
    cplx acc = 0.0;
    for (std::size_t n = std::max(i, j); n < a.size(); ++n) {
        if (a[n] == 0.0) continue;
        acc += a[n] * detail::falling(n, i) * detail::falling(n, j) * detail::ipow(z, n - i) * detail::ipow(wb, n - j);
    }
    return acc;
}

class MatrixKernel {
public:
    static constexpr std::size_t max_order = 4;

    MatrixKernel(KernelSpec k0, KernelSpec k1, std::size_t order, double truncation_tol = 1e-12)
        : k0_(std::move(k0)), k1_(std::move(k1)), order_(order), truncation_tol_(truncation_tol) {
        if (order > max_order) throw ConfigError("jk_kernel: order k must be <= 4");
    }

    std::size_t order() const noexcept { return order_; }

    Eigen::MatrixXcd operator()(cplx z, cplx w, const EvalOptions& opt = {}) const {
        const KernelValue v0 = eval_kernel(k0_, z, w, opt);
        check_truncation(std::abs(z) * std::abs(w), v0);
        const std::size_t dim = order_ + 1;
        Eigen::MatrixXcd m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    v0.value * kernel_derivative(k1_, i, j, z, w);
        return m;
    }

private:
    void check_truncation(double s, const KernelValue& v0) const {
        // tail of the most differentiated series relative to its own size
        const std::size_t n = k1_.truncation();
        if (n <= 2 * order_) return;
        const double last = k1_.coefficient(n) * std::pow(detail::falling(n, order_), 2.0) *
                            std::pow(s, static_cast<double>(n - order_));
        const double ref = std::max(1e-300, k1_.coefficient(0) + k1_.partial_sum(s));
        if (last / (1.0 - std::min(s, 0.999)) > truncation_tol_ * ref || v0.tail_bound > truncation_tol_ * std::abs(v0.value))
            throw DomainError("jk_kernel: truncation insufficient (tail bound exceeds tolerance)");
    }

    KernelSpec k0_;
    KernelSpec k1_;
    std::size_t order_;
    double truncation_tol_;
};

inline MatrixKernel jk_kernel(const KernelSpec& k0, const KernelSpec& k1, std::size_t k) { return {k0, k1, k}; }

struct GramReport {
    Eigen::MatrixXcd gram;
    double hermitian_residual = 0.0;  // max |G - G*|
    double min_eigenvalue = 0.0;
    bool nonnegative = false;  // min eigenvalue >= -psd_tol
};

inline GramReport analyse_gram(Eigen::MatrixXcd g, double psd_tol = 1e-9) {
    GramReport r;
    r.hermitian_residual = (g - g.adjoint()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd herm = (g + g.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    r.nonnegative = r.min_eigenvalue >= -psd_tol;
    r.gram = std::move(g);
    return r;
}

/// Block Gram [J(p_a, p_b)]_{a,b} of a matrix kernel over sample points.
inline GramReport sampled_gram(const MatrixKernel& j, const std::vector<cplx>& points, double psd_tol = 1e-9) {
    if (points.empty()) throw ConfigError("sampled_gram: empty sample set");
    const auto dim = static_cast<Eigen::Index>(j.order() + 1);
    const auto m = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXcd g(dim * m, dim * m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
            g.block(a * dim, b * dim, dim, dim) = j(points[static_cast<std::size_t>(a)], points[static_cast<std::size_t>(b)]);
    return analyse_gram(std::move(g), psd_tol);
}

// ---------------------------------------------------------------------------
// Multiplier bound witness: (c^2 - phi(z) conj phi(w)) K0(z,w) >= 0
// ---------------------------------------------------------------------------

struct CoordinateMultiplier {};
struct ConstantMultiplier {
    cplx value;
};
using Multiplier = std::variant<CoordinateMultiplier, MobiusMap, ConstantMultiplier>;

inline cplx apply_multiplier(const Multiplier& m, cplx z) {
    return std::visit(
        [&](const auto& f) -> cplx {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, CoordinateMultiplier>)
                return z;
            else if constexpr (std::is_same_v<F, ConstantMultiplier>)
                return f.value;
            else
                return f(z);
        },
        m);
}

inline GramReport multiplier_bound_witness(const KernelSpec& k0, const Multiplier& phi, double c,
                                           const std::vector<cplx>& points, double psd_tol = 1e-9) {
    if (points.empty()) throw ConfigError("multiplier_bound_witness: empty sample set");
    if (!(c > 0.0)) throw ConfigError("multiplier_bound_witness: c must be > 0");
    const auto m = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXcd g(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        const cplx za = points[static_cast<std::size_t>(a)];
        for (Eigen::Index b = 0; b < m; ++b) {
            const cplx zb = points[static_cast<std::size_t>(b)];
            g(a, b) = (c * c - apply_multiplier(phi, za) * std::conj(apply_multiplier(phi, zb))) *
                      eval_kernel(k0, za, zb).value;
        }
    }
    return analyse_gram(std::move(g), psd_tol);
}

// ---------------------------------------------------------------------------
// Radial ratio profiles
// ---------------------------------------------------------------------------

enum class LimitClass { zero, infinity, bounded };

inline std::string to_string(LimitClass c) {
    switch (c) {
    case LimitClass::zero: return "zero";
    case LimitClass::infinity: return "infinity";
    case LimitClass::bounded: return "bounded";
    }
    return "unknown";
}

struct RatioOptions {
    double upper_threshold = 1e6;
    double lower_threshold = 1e-6;
    /// |exponent| above this counts as a trend towards 0 or infinity
    double exponent_tol = 0.1;
    double truncation_rel_tol = 1e-12;
};

struct RatioReport {
    std::vector<double> radii;
    std::vector<double> values;
    /// slope of log(value) against log(1/(1-r^2)) over the outer quartile
    double exponent = 0.0;
    bool bounded_above = true;
    bool bounded_from_zero = true;
    LimitClass limit_class = LimitClass::bounded;
};

inline RatioReport kernel_ratio_profile(const KernelSpec& num, const KernelSpec& den, const std::vector<double>& radii,
                                        const RatioOptions& opt = {}) {
    if (radii.size() < 4) throw ConfigError("kernel_ratio_profile: need at least 4 radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] >= 0.0) || !(radii[i] < 1.0)) throw ConfigError("kernel_ratio_profile: radii must lie in [0,1)");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw ConfigError("kernel_ratio_profile: radii must increase strictly");
    }
    const double s_max = radii.back() * radii.back();
    const KernelSpec kn = adapt_truncation(num, s_max, opt.truncation_rel_tol);
    const KernelSpec kd = adapt_truncation(den, s_max, opt.truncation_rel_tol);

    RatioReport rep;
    rep.radii = radii;
    for (double r : radii) {
        const double dv = kd.partial_sum(r * r);
        if (!(dv > 0.0)) throw DomainError("kernel_ratio_profile: denominator vanishes at r=" + std::to_string(r));
        rep.values.push_back(kn.partial_sum(r * r) / dv);
    }

    const std::size_t first = radii.size() - std::max<std::size_t>(2, radii.size() / 4);
    std::vector<double> xs, ys;
    for (std::size_t i = first; i < radii.size(); ++i) {
        xs.push_back(-std::log1p(-radii[i] * radii[i]));
        ys.push_back(std::log(rep.values[i]));
    }
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xm += xs[i];
        ym += ys[i];
    }
    xm /= static_cast<double>(xs.size());
    ym /= static_cast<double>(xs.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - xm) * (ys[i] - ym);
        sxx += (xs[i] - xm) * (xs[i] - xm);
    }
    rep.exponent = sxx > 0.0 ? sxy / sxx : 0.0;

    const double last = rep.values.back();
    if (last > opt.upper_threshold || rep.exponent > opt.exponent_tol)
        rep.limit_class = LimitClass::infinity;
    else if (last < opt.lower_threshold || rep.exponent < -opt.exponent_tol)
        rep.limit_class = LimitClass::zero;
    else
        rep.limit_class = LimitClass::bounded;
    rep.bounded_above = rep.limit_class != LimitClass::infinity;
    rep.bounded_from_zero = rep.limit_class != LimitClass::zero;
    return rep;
}

struct BoundaryLimitEntry {
    double lambda;
    LimitClass product_class;  // K K^(lambda)
    LimitClass quotient_class;  // K / K^(lambda)
    bool satisfied;             // both classes are zero or infinity
};

struct BoundaryLimitReport {
    std::vector<BoundaryLimitEntry> entries;
    bool holds = true;
};

/// For each lambda in the grid, the boundary behaviour of K K^(lambda) and
/// K / K^(lambda) must be a limit 0 or infinity, never bounded and nonzero.
inline BoundaryLimitReport boundary_limit_scan(const KernelSpec& k, const std::vector<double>& lambdas,
                                               const std::vector<double>& radii, const RatioOptions& opt = {}) {
    BoundaryLimitReport rep;
    const KernelSpec one = KernelSpec::table({1.0});
    for (double lam : lambdas) {
        const KernelSpec kl = KernelSpec::lambda(lam);
        const LimitClass pc = kernel_ratio_profile(KernelSpec::product(k, kl), one, radii, opt).limit_class;
        const LimitClass qc = kernel_ratio_profile(k, kl, radii, opt).limit_class;
        const bool ok = pc != LimitClass::bounded && qc != LimitClass::bounded;
        rep.entries.push_back({lam, pc, qc, ok});
        rep.holds = rep.holds && ok;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Metric determinant of the upper triangular model
// ---------------------------------------------------------------------------

struct MetricDetReport {
    double ratio = 1.0;  // det h_T / (K^(mu) K1) at (conj w, conj w)
    double det = 0.0;
    double k_mu = 0.0;
    double k1 = 0.0;
    cplx inner = 0.0;      // <X K1(., conj w), K^(mu)(., conj w)>
    double norm_sq = 0.0;  // ||X K1(., conj w)||^2 in the K^(mu) space
    double sup_x_sq = 0.0;           // sup |x_n|^2 over the truncation
    double operator_norm_sq = 0.0;   // sup |x_n|^2 a_n(K1) / a_n(K^(mu)) over the truncation
    double tail_bound = 0.0;
};

/// X acts diagonally on monomials, z^n -> x_n z^n, from the K1 space into the K^(mu) space.
inline MetricDetReport metric_det_ratio(double mu, const KernelSpec& k1, const SequenceSpec& x, cplx w,
                                        const EvalOptions& opt = {}) {
    detail::require_in_disc(w, opt.radius_limit, "metric_det_ratio");
    const std::size_t n_max = k1.truncation();
    const KernelSpec kmu = KernelSpec::lambda(mu, n_max);
    const double s = std::norm(w);

    MetricDetReport r;
    double pw = 1.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double amu = kmu.coefficient(n);
        const double a1 = k1.coefficient(n);
        if (!(amu > 0.0)) throw DomainError("metric_det_ratio: zero coefficient of K^(mu)", static_cast<Index>(n));
        const cplx xn = x(static_cast<Index>(n));
        r.k_mu += amu * pw;
        r.k1 += a1 * pw;
        r.inner += xn * a1 * pw;
        r.norm_sq += std::norm(xn) * a1 * a1 * pw / amu;
        r.sup_x_sq = std::max(r.sup_x_sq, std::norm(xn));
        r.operator_norm_sq = std::max(r.operator_norm_sq, std::norm(xn) * a1 / amu);
        pw *= s;
    }
    r.tail_bound = std::max(kmu.tail_bound(s), k1.tail_bound(s));
    r.det = r.k_mu * (r.norm_sq + r.k1) - std::norm(r.inner);
    r.ratio = r.det / (r.k_mu * r.k1);
    return r;
}

}  // namespace blockshift_lab

#endif  // BLOCKSHIFT_LAB_KERNELS_HPP
