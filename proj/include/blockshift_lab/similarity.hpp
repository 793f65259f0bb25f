#ifndef BLOCKSHIFT_LAB_SIMILARITY_HPP
#define BLOCKSHIFT_LAB_SIMILARITY_HPP

// Similarity diagnostics: the weight-product ratio test for bilateral shifts,
// the trace multiset invariant of the one-parameter class, and spec-vs-spec
// comparison built on it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "blockshift_lab/blockshift.hpp"
#include "blockshift_lab/seqcore.hpp"
#include "blockshift_lab/types.hpp"

namespace blockshift_lab {

enum class Trend { flat, growing, shrinking };
enum class ShieldsVerdict { bounded_on_window, diverging, inconclusive };

inline std::string to_string(Trend t) {
    switch (t) {
    case Trend::flat: return "flat";
    case Trend::growing: return "growing";
    case Trend::shrinking: return "shrinking";
    }
    return "unknown";
}

inline std::string to_string(ShieldsVerdict v) {
    switch (v) {
    case ShieldsVerdict::bounded_on_window: return "bounded-on-window";
    case ShieldsVerdict::diverging: return "diverging";
    case ShieldsVerdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

struct ShieldsReport {
    Index k = 0;
    double inf_ratio = 1.0;
    double sup_ratio = 1.0;
    double log_spread = 0.0;  // log(sup_ratio / inf_ratio)
    double spread = 1.0;
    Trend trend = Trend::flat;
    ShieldsVerdict verdict = ShieldsVerdict::inconclusive;
    std::vector<double> nested_log_spreads;  // quarter, half, full window
};

struct ShieldsOptions {
    double spread_bound = 1e6;
};

namespace detail {

struct LogRange {
    double lo;
    double hi;
};

/// inf and sup over m <= n in [a, b] of sum_{i=m..n} delta(i).
inline LogRange pair_sum_range(const std::vector<double>& delta, std::size_t a, std::size_t b) {
    double prefix = 0.0;
    double min_prefix = 0.0;
    double max_prefix = 0.0;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = a; i <= b; ++i) {
        prefix += delta[i];
        hi = std::max(hi, prefix - min_prefix);
        lo = std::min(lo, prefix - max_prefix);
        min_prefix = std::min(min_prefix, prefix);
        max_prefix = std::max(max_prefix, prefix);
    }
    return {lo, hi};
}

inline double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xm += xs[i] / n;
        ym += ys[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - xm) * (ys[i] - ym);
        sxx += (xs[i] - xm) * (xs[i] - xm);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

inline ShieldsReport shields_at(const SequenceSpec& w, const SequenceSpec& v, Index k, const Window& win,
                                const ShieldsOptions& opt) {
    std::vector<double> delta;
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        const double wn = std::abs(w(k + n));
        const double vn = std::abs(v(n));
        if (wn == 0.0) throw DomainError("shields_diagnostic: zero weight w", k + n);
        if (vn == 0.0) throw DomainError("shields_diagnostic: zero weight v", n);
        delta.push_back(std::log(wn) - std::log(vn));
    }
    const std::size_t len = delta.size();
    ShieldsReport rep;
    rep.k = k;
    const LogRange full = pair_sum_range(delta, 0, len - 1);
    rep.inf_ratio = std::exp(full.lo);
    rep.sup_ratio = std::exp(full.hi);
    rep.log_spread = full.hi - full.lo;
    rep.spread = std::exp(rep.log_spread);

    // nested centred windows of roughly L/4, L/2, L
    std::vector<double> lengths;
    const std::size_t centre = (len - 1) / 2;
    for (std::size_t half : {len / 8, len / 4, len}) {
        const std::size_t a = centre >= half ? centre - half : 0;
        const std::size_t b = std::min(len - 1, centre + half);
        const LogRange r = pair_sum_range(delta, a, b);
        rep.nested_log_spreads.push_back(r.hi - r.lo);
        lengths.push_back(static_cast<double>(b - a + 1));
    }
    const double growth = slope(lengths, rep.nested_log_spreads) * static_cast<double>(len);
    if (growth > std::log(2.0))
        rep.trend = Trend::growing;
    else if (growth < -std::log(2.0))
        rep.trend = Trend::shrinking;
    else
        rep.trend = Trend::flat;

    const bool within = rep.spread <= opt.spread_bound;
    if (within && rep.trend == Trend::flat)
        rep.verdict = ShieldsVerdict::bounded_on_window;
    else if (!within && rep.trend == Trend::growing)
        rep.verdict = ShieldsVerdict::diverging;
    else
        rep.verdict = ShieldsVerdict::inconclusive;
    return rep;
}

}  // namespace detail

/// Bounds of |w_{k+m}...w_{k+n}| / |v_m...v_n| over m <= n in the window, for the
/// offset k in [k_lo, k_hi] with the smallest spread (ties: smallest |k|, then k).
inline ShieldsReport shields_diagnostic(const SequenceSpec& w, const SequenceSpec& v, Index k_lo, Index k_hi,
                                        const Window& win, const ShieldsOptions& opt = {}) {
    if (k_lo > k_hi) throw ConfigError("shields_diagnostic: empty k range");
    std::optional<ShieldsReport> best;
    for (Index k = k_lo; k <= k_hi; ++k) {
        ShieldsReport r = detail::shields_at(w, v, k, win, opt);
        if (!best || r.log_spread < best->log_spread ||
            (r.log_spread == best->log_spread &&
             std::pair(std::abs(r.k), r.k) < std::pair(std::abs(best->k), best->k)))
            best = std::move(r);
    }
    return *best;
}

struct InvariantSet {
    std::vector<double> values;  // sorted ascending
    Window win;
    Index lower_bound;  // first index included
    std::vector<std::string> notes;
};

/// ceil((1 - i0) / 2)
inline Index invariant_lower_bound(Index i0) {
    const Index num = 1 - i0;
    return num >= 0 ? (num + 1) / 2 : -((-num) / 2);
}

/// Sorted values (|alpha|^2+1)(t_n^2 + 1/t_n^2) - 2|alpha|^2 over the window, from
/// n >= ceil((1 - i0)/2) when a reflection i0 is given.
inline InvariantSet trace_invariant_set(const SequenceSpec& t, cplx alpha, const Window& win,
                                        std::optional<Index> i0 = std::nullopt, double tol = default_tol) {
    const Index lb = i0 ? std::max(win.n_min(), invariant_lower_bound(*i0)) : win.n_min();
    InvariantSet set{{}, win, lb, {}};
    const double a2 = std::norm(alpha);
    if (alpha == cplx(0.0)) set.notes.push_back("alpha = 0 lies outside the hypothesis alpha != 0");
    for (Index n = lb; n <= win.n_max(); ++n) {
        const cplx tn = t(n);
        if (is_non_real(tn, tol) || tn.real() <= 0.0)
            throw InapplicableError("trace_invariant_set: t not real positive at n=" + std::to_string(n));
        const double x = tn.real() * tn.real();
        set.values.push_back((a2 + 1.0) * (x + 1.0 / x) - 2.0 * a2);
    }
    std::sort(set.values.begin(), set.values.end());
    return set;
}

/// Sorted trace A_n multiset of a general spec over n >= lower_bound in the window.
inline std::vector<double> sorted_traces(const BlockShiftSpec& s, const Window& win, Index lower_bound) {
    std::vector<double> out;
    for (Index n = std::max(lower_bound, win.n_min()); n <= win.n_max(); ++n) out.push_back(trace_A(s, n));
    std::sort(out.begin(), out.end());
    return out;
}

/// Invariant-set comparison: not similar when the reflections differ in parity,
/// otherwise the sorted trace multisets must agree within tol.
inline Verdict compare_similarity(const BlockShiftSpec& a, const BlockShiftSpec& b, const Window& win,
                                  double tol = default_tol, std::optional<Index> i0_a = std::nullopt,
                                  std::optional<Index> i0_b = std::nullopt) {
    if (!a.class_td() || !b.class_td()) return Verdict::inapplicable("both specs must be of the form v = 1/w");
    if (!i0_a) i0_a = find_reflection(a, win, tol).i0;
    if (!i0_b) i0_b = find_reflection(b, win, tol).i0;
    if (!i0_a || !i0_b) return Verdict::inapplicable("missing reflection pairing for one of the specs");

    Verdict v;
    v.tolerances["tol"] = tol;
    v.notes.push_back("reflections i0 = " + std::to_string(*i0_a) + " and " + std::to_string(*i0_b));
    const bool same_parity = ((*i0_a - *i0_b) % 2) == 0;
    v.witnesses.push_back(Witness{std::nullopt, "parity", static_cast<double>(*i0_a - *i0_b), 0.0, same_parity, {}});
    if (!same_parity) {
        v.fail(std::nullopt, "parity");
        return v;
    }
    const std::vector<double> sa = sorted_traces(a, win, invariant_lower_bound(*i0_a));
    const std::vector<double> sb = sorted_traces(b, win, invariant_lower_bound(*i0_b));
    const std::size_t len = std::min(sa.size(), sb.size());
    if (sa.size() != sb.size())
        v.notes.push_back("multisets truncated to common length " + std::to_string(len));
    for (std::size_t k = 0; k < len; ++k) {
        const bool ok = close(sa[k], sb[k], tol);
        if (!ok) {
            v.witnesses.push_back(Witness{static_cast<Index>(k), "trace multiset", std::abs(sa[k] - sb[k]), tol, false,
                                          "sorted position"});
            v.fail(static_cast<Index>(k), "trace multiset");
        }
    }
    return v;
}

}  // namespace blockshift_lab

#endif  // BLOCKSHIFT_LAB_SIMILARITY_HPP
