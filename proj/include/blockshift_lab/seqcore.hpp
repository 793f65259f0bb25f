#ifndef BLOCKSHIFT_LAB_SEQCORE_HPP
#define BLOCKSHIFT_LAB_SEQCORE_HPP

// Z-indexed complex sequences built from a closed constructor family, plus
// window-scoped diagnostics (modulus periodicity, ratio-product decay).

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "blockshift_lab/types.hpp"

namespace blockshift_lab {

struct SequenceNode;

/// Immutable handle to a sequence expression tree. Copies share the tree.
class SequenceSpec {
public:
    SequenceSpec() = default;  // empty handle; evaluating it throws
    explicit SequenceSpec(std::shared_ptr<const SequenceNode> node) : node_(std::move(node)) {}

    const SequenceNode& node() const {
        if (!node_) throw ConfigError("empty SequenceSpec");
        return *node_;
    }
    bool empty() const noexcept { return !node_; }

    cplx operator()(Index n) const;

private:
    std::shared_ptr<const SequenceNode> node_;
};

namespace seqkind {

struct Constant {
    cplx value;
};
struct Table {
    std::map<Index, cplx> entries;
    std::optional<cplx> fallback;  // serialized as "default"
};
/// (n + c1 + s) / (n + c2 - s)
struct MobiusRational {
    double c1;
    double c2;
    cplx s;
};
/// sqrt((n + a) / (n + b)), only where n + a > 0 and n + b > 0
struct SqrtRatio {
    double a;
    double b;
};
/// cycle[n mod p]
struct Periodic {
    std::vector<cplx> cycle;
};
struct ReciprocalOf {
    SequenceSpec inner;
};
/// -inner(-(n + shift))
struct NegatedShiftedReflection {
    SequenceSpec inner;
    Index shift;
};
struct PointwiseProduct {
    SequenceSpec left;
    SequenceSpec right;
};
/// sum_k coefficients[k] * n^k
struct Polynomial {
    std::vector<cplx> coefficients;
};
/// sqrt(|numerator(n) / denominator(n)|)
struct SqrtAbsQuotient {
    SequenceSpec numerator;
    SequenceSpec denominator;
};

}  // namespace seqkind

struct SequenceNode {
    std::variant<seqkind::Constant, seqkind::Table, seqkind::MobiusRational, seqkind::SqrtRatio,
                 seqkind::Periodic, seqkind::ReciprocalOf, seqkind::NegatedShiftedReflection,
                 seqkind::PointwiseProduct, seqkind::Polynomial, seqkind::SqrtAbsQuotient>
        kind;
};

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

namespace seq {

template <class Kind>
SequenceSpec make(Kind k) {
    return SequenceSpec(std::make_shared<const SequenceNode>(SequenceNode{std::move(k)}));
}

inline SequenceSpec constant(cplx c) { return make(seqkind::Constant{c}); }
inline SequenceSpec table(std::map<Index, cplx> entries, std::optional<cplx> fallback = std::nullopt) {
    return make(seqkind::Table{std::move(entries), fallback});
}
inline SequenceSpec mobius_rational(double c1, double c2, cplx s) { return make(seqkind::MobiusRational{c1, c2, s}); }
inline SequenceSpec sqrt_ratio(double a, double b) { return make(seqkind::SqrtRatio{a, b}); }
inline SequenceSpec periodic(std::vector<cplx> cycle) {
    if (cycle.empty()) throw ConfigError("periodic: cycle must be nonempty");
    return make(seqkind::Periodic{std::move(cycle)});
}
inline SequenceSpec reciprocal_of(SequenceSpec inner) { return make(seqkind::ReciprocalOf{std::move(inner)}); }
inline SequenceSpec negated_shifted_reflection(SequenceSpec inner, Index shift) {
    return make(seqkind::NegatedShiftedReflection{std::move(inner), shift});
}
inline SequenceSpec product(SequenceSpec left, SequenceSpec right) {
    return make(seqkind::PointwiseProduct{std::move(left), std::move(right)});
}
inline SequenceSpec polynomial(std::vector<cplx> coefficients) {
    return make(seqkind::Polynomial{std::move(coefficients)});
}
/// n + offset
inline SequenceSpec affine(double offset) { return polynomial({cplx(offset), cplx(1.0)}); }
inline SequenceSpec sqrt_abs_quotient(SequenceSpec numerator, SequenceSpec denominator) {
    return make(seqkind::SqrtAbsQuotient{std::move(numerator), std::move(denominator)});
}

}  // namespace seq

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline cplx checked(cplx value, Index n, const char* kind) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw DomainError(std::string(kind) + ": non-finite value", n);
    return value;
}

struct Evaluator {
    Index n;

    cplx operator()(const seqkind::Constant& k) const { return k.value; }

    cplx operator()(const seqkind::Table& k) const {
        if (auto it = k.entries.find(n); it != k.entries.end()) return it->second;
        if (k.fallback) return *k.fallback;
        throw DomainError("table: index missing and no default", n);
    }

    cplx operator()(const seqkind::MobiusRational& k) const {
        const double m = static_cast<double>(n);
        const cplx den = m + k.c2 - k.s;
        if (den == cplx(0.0)) throw DomainError("mobius-rational: zero denominator", n);
        return checked((m + k.c1 + k.s) / den, n, "mobius-rational");
    }

    cplx operator()(const seqkind::SqrtRatio& k) const {
        const double m = static_cast<double>(n);
        if (!(m + k.a > 0.0) || !(m + k.b > 0.0))
            throw DomainError("sqrt-ratio: requires n+a > 0 and n+b > 0", n);
        return std::sqrt((m + k.a) / (m + k.b));
    }

    cplx operator()(const seqkind::Periodic& k) const {
        const auto p = static_cast<Index>(k.cycle.size());
        return k.cycle[static_cast<std::size_t>(((n % p) + p) % p)];
    }

    cplx operator()(const seqkind::ReciprocalOf& k) const {
        const cplx inner = k.inner(n);
        if (inner == cplx(0.0)) throw DomainError("reciprocal-of: inner value is zero", n);
        return checked(1.0 / inner, n, "reciprocal-of");
    }

    cplx operator()(const seqkind::NegatedShiftedReflection& k) const { return -k.inner(-(n + k.shift)); }

    cplx operator()(const seqkind::PointwiseProduct& k) const {
        return checked(k.left(n) * k.right(n), n, "pointwise-product");
    }

    cplx operator()(const seqkind::Polynomial& k) const {
        const double m = static_cast<double>(n);
        cplx acc = 0.0;
        for (auto it = k.coefficients.rbegin(); it != k.coefficients.rend(); ++it) acc = acc * m + *it;
        return checked(acc, n, "polynomial");
    }

    cplx operator()(const seqkind::SqrtAbsQuotient& k) const {
        const cplx den = k.denominator(n);
        if (den == cplx(0.0)) throw DomainError("sqrt-abs-quotient: zero denominator", n);
        return checked(std::sqrt(std::abs(k.numerator(n) / den)), n, "sqrt-abs-quotient");
    }
};

}  // namespace detail

inline cplx SequenceSpec::operator()(Index n) const { return std::visit(detail::Evaluator{n}, node().kind); }

inline cplx eval_seq(const SequenceSpec& spec, Index n) { return spec(n); }

inline std::vector<cplx> window_values(const SequenceSpec& spec, const Window& win) {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(win.length()));
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        try {
            out.push_back(spec(n));
        } catch (const DomainError& e) {
            throw DomainError(std::string("window_values: ") + e.what(), n);
        }
    }
    return out;
}

/// Deep structural equality of two expression trees.
bool structurally_equal(const SequenceSpec& a, const SequenceSpec& b);

namespace detail {

struct StructuralEq {
    const SequenceNode& other;

    template <class K>
    bool operator()(const K& k) const {
        const auto* o = std::get_if<K>(&other.kind);
        return o && eq(k, *o);
    }

    static bool eq(const seqkind::Constant& a, const seqkind::Constant& b) { return a.value == b.value; }
    static bool eq(const seqkind::Table& a, const seqkind::Table& b) {
        return a.entries == b.entries && a.fallback == b.fallback;
    }
    static bool eq(const seqkind::MobiusRational& a, const seqkind::MobiusRational& b) {
        return a.c1 == b.c1 && a.c2 == b.c2 && a.s == b.s;
    }
    static bool eq(const seqkind::SqrtRatio& a, const seqkind::SqrtRatio& b) { return a.a == b.a && a.b == b.b; }
    static bool eq(const seqkind::Periodic& a, const seqkind::Periodic& b) { return a.cycle == b.cycle; }
    static bool eq(const seqkind::ReciprocalOf& a, const seqkind::ReciprocalOf& b) {
        return structurally_equal(a.inner, b.inner);
    }
    static bool eq(const seqkind::NegatedShiftedReflection& a, const seqkind::NegatedShiftedReflection& b) {
        return a.shift == b.shift && structurally_equal(a.inner, b.inner);
    }
    static bool eq(const seqkind::PointwiseProduct& a, const seqkind::PointwiseProduct& b) {
        return structurally_equal(a.left, b.left) && structurally_equal(a.right, b.right);
    }
    static bool eq(const seqkind::Polynomial& a, const seqkind::Polynomial& b) {
        return a.coefficients == b.coefficients;
    }
    static bool eq(const seqkind::SqrtAbsQuotient& a, const seqkind::SqrtAbsQuotient& b) {
        return structurally_equal(a.numerator, b.numerator) && structurally_equal(a.denominator, b.denominator);
    }
};

}  // namespace detail

inline bool structurally_equal(const SequenceSpec& a, const SequenceSpec& b) {
    if (a.empty() || b.empty()) return a.empty() && b.empty();
    if (&a.node() == &b.node()) return true;
    return std::visit(detail::StructuralEq{b.node()}, a.node().kind);
}

/// If spec is a constant sequence, its value.
inline std::optional<cplx> constant_value(const SequenceSpec& spec) {
    if (spec.empty()) return std::nullopt;
    if (const auto* c = std::get_if<seqkind::Constant>(&spec.node().kind)) return c->value;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct PeriodicityReport {
    bool applicable = true;
    bool periodic = false;
    std::optional<Index> period;
    /// Deviation at the reported period, or the smallest deviation over all
    /// candidate periods when none qualifies.
    double max_deviation = 0.0;
    std::string note;
};

/// Smallest p <= L/2 with max_n ||s(n+p)| - |s(n)|| <= tol on the window.
inline PeriodicityReport is_modulus_periodic(const SequenceSpec& spec, const Window& win, double tol = default_tol) {
    PeriodicityReport rep;
    if (win.length() < 4) {
        rep.applicable = false;
        rep.note = "window too short (length < 4)";
        return rep;
    }
    std::vector<double> mod;
    for (cplx value : window_values(spec, win)) mod.push_back(std::abs(value));
    for (std::size_t k = 0; k < mod.size(); ++k)
        if (mod[k] == 0.0) throw DomainError("is_modulus_periodic: zero weight", win.n_min() + static_cast<Index>(k));

    const std::size_t len = mod.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 1; p <= len / 2; ++p) {
        double dev = 0.0;
        for (std::size_t k = 0; k + p < len; ++k) {
            const double scale = std::max({1.0, mod[k], mod[k + p]});
            dev = std::max(dev, std::abs(mod[k + p] - mod[k]) / scale);
        }
        best = std::min(best, dev);
        if (dev <= tol) {
            rep.periodic = true;
            rep.period = static_cast<Index>(p);
            rep.max_deviation = dev;
            rep.note = "window-scoped: periodic on [" + std::to_string(win.n_min()) + "," +
                       std::to_string(win.n_max()) + "]";
            return rep;
        }
    }
    rep.max_deviation = best;
    rep.note = "window-scoped: no period <= " + std::to_string(len / 2) + " on window";
    return rep;
}

/// spec(n + p) == spec(n) within tol for every n in win (value, not modulus).
inline bool has_value_period(const SequenceSpec& spec, const Window& win, Index p, double tol = default_tol) {
    for (Index n = win.n_min(); n <= win.n_max(); ++n)
        if (!close(spec(n + p), spec(n), tol)) return false;
    return true;
}

struct DecayReport {
    std::vector<double> partial_products;  // exp of log_products; may underflow to 0
    std::vector<double> log_products;
    double log_slope = 0.0;
    bool decays = false;
};

struct DecayOptions {
    /// decays requires the regression slope of log P_k against k to be below this
    double slope_threshold = -0.01;
};

namespace detail {

/// Least-squares slope of ys against x = 0, 1, 2, ...
inline double regression_slope(const std::vector<double>& ys) {
    const std::size_t n = ys.size();
    if (n < 2) return 0.0;
    const double xm = static_cast<double>(n - 1) / 2.0;
    const double ym = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = static_cast<double>(k) - xm;
        sxy += dx * (ys[k] - ym);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

}  // namespace detail

/// partial_products[k] = prod_{m=0..k} |w(j+m)| / |v(i+m)|, accumulated in log domain.
inline DecayReport ratio_product_decay(const SequenceSpec& w, const SequenceSpec& v, Index i, Index j, Index k_max,
                                       const DecayOptions& opt = {}) {
    if (k_max < 8) throw ConfigError("ratio_product_decay: k_max must be >= 8");
    DecayReport rep;
    double acc = 0.0;
    for (Index m = 0; m <= k_max; ++m) {
        const double wm = std::abs(w(j + m));
        const double vm = std::abs(v(i + m));
        if (wm == 0.0) throw DomainError("ratio_product_decay: zero weight w", j + m);
        if (vm == 0.0) throw DomainError("ratio_product_decay: zero weight v", i + m);
        acc += std::log(wm) - std::log(vm);
        rep.log_products.push_back(acc);
        rep.partial_products.push_back(std::exp(acc));
    }
    rep.log_slope = detail::regression_slope(rep.log_products);
    rep.decays = rep.log_slope < opt.slope_threshold && rep.log_products.back() < rep.log_products.front();
    return rep;
}

}  // namespace blockshift_lab

#endif  // BLOCKSHIFT_LAB_SEQCORE_HPP
