#ifndef BLOCKSHIFT_LAB_BLOCKSHIFT_HPP
#define BLOCKSHIFT_LAB_BLOCKSHIFT_HPP

// The 2x2 block shift T = [[T0, X T1 - T0 X], [0, T1]] on the direct sum of two
// copies of l2(Z), where T0, T1 are bilateral weighted shifts with weights w, v
// and X is diagonal with entries d. T maps H(n) = span{(e_n,0),(0,e_n)} into
// H(n+1) through the local 2x2 block T_n.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "blockshift_lab/seqcore.hpp"
#include "blockshift_lab/types.hpp"

namespace blockshift_lab {

using Mat2 = Eigen::Matrix2cd;
using MatX = Eigen::MatrixXcd;

struct BlockShiftSpec {
    SequenceSpec w;  // weights of T0
    SequenceSpec v;  // weights of T1
    SequenceSpec d;  // diagonal of X

    /// The one-parameter class with v = 1/w, constructed as v = reciprocal-of(w).
    static BlockShiftSpec td(SequenceSpec t, SequenceSpec d) {
        SequenceSpec v = seq::reciprocal_of(t);
        return BlockShiftSpec{std::move(t), std::move(v), std::move(d)};
    }

    bool class_td() const {
        if (v.empty() || w.empty()) return false;
        const auto* r = std::get_if<seqkind::ReciprocalOf>(&v.node().kind);
        return r && structurally_equal(r->inner, w);
    }

    /// w in the class_td case; empty otherwise.
    SequenceSpec t() const { return class_td() ? w : SequenceSpec{}; }
};

struct LocalBlock {
    Index n;
    Mat2 m;
};

struct GramPair {
    Index n;
    Mat2 A;  // T_n* T_n
    Mat2 B;  // T_{n-1} T_{n-1}*
};

/// Off-diagonal entry of the local block at n: d(n+1) v(n) - d(n) w(n).
inline cplx coupling(const BlockShiftSpec& s, Index n) { return s.d(n + 1) * s.v(n) - s.d(n) * s.w(n); }

inline LocalBlock local_block(const BlockShiftSpec& s, Index n) {
    Mat2 m;
    m << s.w(n), coupling(s, n), cplx(0.0), s.v(n);
    return LocalBlock{n, m};
}

inline GramPair local_gram(const BlockShiftSpec& s, Index n) {
    const Mat2 tn = local_block(s, n).m;
    const Mat2 tp = local_block(s, n - 1).m;
    return GramPair{n, tn.adjoint() * tn, tp * tp.adjoint()};
}

inline double trace_A(const BlockShiftSpec& s, Index n) {
    return std::norm(s.w(n)) + std::norm(coupling(s, n)) + std::norm(s.v(n));
}

struct IntertwiningReport {
    bool degenerate = false;  // X T1 = T0 X on the window: T is a diagonal direct sum
    double max_coupling = 0.0;
    std::optional<Index> witness;  // an index with nonzero coupling
};

/// Checks X T1 != T0 X on the window and that both weight sequences are nonzero.
inline IntertwiningReport check_intertwining(const BlockShiftSpec& s, const Window& win, double tol = default_tol) {
    IntertwiningReport rep;
    double scale = 1.0;
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        if (s.w(n) == cplx(0.0)) throw DomainError("block shift: zero weight w", n);
        if (s.v(n) == cplx(0.0)) throw DomainError("block shift: zero weight v", n);
        scale = std::max(scale, std::abs(s.d(n + 1) * s.v(n)) + std::abs(s.d(n) * s.w(n)));
        const double e = std::abs(coupling(s, n));
        if (e > rep.max_coupling) {
            rep.max_coupling = e;
            rep.witness = n;
        }
    }
    rep.degenerate = rep.max_coupling <= tol * scale;
    if (rep.degenerate) rep.witness.reset();
    return rep;
}

/// lambda_n > 1 with lambda^2 + 1/lambda^2 = trace A_n, for det A_n = 1.
inline double eigen_pair(const BlockShiftSpec& s, Index n, double tol = default_tol) {
    const double det = std::norm(s.w(n) * s.v(n));
    if (std::abs(det - 1.0) > tol)
        throw InapplicableError("eigen_pair: det A_n = " + std::to_string(det) + " != 1 at n=" + std::to_string(n));
    const double tr = trace_A(s, n);
    if (tr <= 2.0 + tol) throw InapplicableError("eigen_pair: A_n = I (degenerate) at n=" + std::to_string(n));
    return std::sqrt((tr + std::sqrt(tr * tr - 4.0)) / 2.0);
}

/// sigma_1 >= sigma_2 >= 0, the singular values of T_n.
inline std::pair<double, double> singular_values(const BlockShiftSpec& s, Index n) {
    const double tr = trace_A(s, n);
    const double absdet = std::abs(s.w(n) * s.v(n));
    const double disc = std::max(0.0, tr * tr - 4.0 * absdet * absdet);
    const double s1 = std::sqrt((tr + std::sqrt(disc)) / 2.0);
    const double s2 = s1 > 0.0 ? absdet / s1 : 0.0;
    return {s1, s2};
}

// ---------------------------------------------------------------------------
// Truncations
// ---------------------------------------------------------------------------

enum class TruncationMode { hard, circulant };

inline std::string to_string(TruncationMode m) { return m == TruncationMode::hard ? "hard" : "circulant"; }

struct BasisEntry {
    Index n;
    int component;  // 0: first summand, 1: second summand
};

struct TruncatedOperator {
    Window win;
    TruncationMode mode;
    MatX m;
    std::vector<BasisEntry> index_map;

    /// Position of (n, component) in the interleaved basis.
    Eigen::Index position(Index n, int component) const {
        return static_cast<Eigen::Index>(2 * (n - win.n_min()) + component);
    }
};

namespace detail {

inline void require_value_period(const SequenceSpec& s, const Window& win, const char* name, double tol) {
    if (!has_value_period(s, win, win.length(), tol))
        throw ConfigError(std::string("circulant truncation: sequence ") + name +
                          " is not periodic with period dividing the window length");
}

}  // namespace detail

inline TruncatedOperator truncate(const BlockShiftSpec& s, const Window& win, TruncationMode mode,
                                  double tol = default_tol) {
    if (mode == TruncationMode::circulant) {
        detail::require_value_period(s.w, win, "w", tol);
        detail::require_value_period(s.v, win, "v", tol);
        detail::require_value_period(s.d, win, "d", tol);
    }
    const Index len = win.length();
    TruncatedOperator op{win, mode, MatX::Zero(2 * len, 2 * len), {}};
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        op.index_map.push_back({n, 0});
        op.index_map.push_back({n, 1});
    }
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        Index target = n + 1;
        if (!win.contains(target)) {
            if (mode == TruncationMode::hard) continue;
            target = win.n_min();
        }
        const Mat2 b = local_block(s, n).m;
        op.m.block<2, 2>(op.position(target, 0), op.position(n, 0)) = b;
    }
    return op;
}

/// Scalar bilateral weighted shift e_n -> w(n) e_{n+1} on the window.
inline MatX truncate_shift(const SequenceSpec& w, const Window& win, TruncationMode mode, double tol = default_tol) {
    if (mode == TruncationMode::circulant) detail::require_value_period(w, win, "w", tol);
    const Index len = win.length();
    MatX m = MatX::Zero(len, len);
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        Index target = n + 1;
        if (!win.contains(target)) {
            if (mode == TruncationMode::hard) continue;
            target = win.n_min();
        }
        m(target - win.n_min(), n - win.n_min()) = w(n);
    }
    return m;
}

/// Diagonal operator with entries d(n) on the window.
inline MatX truncate_diagonal(const SequenceSpec& d, const Window& win) {
    const Index len = win.length();
    MatX m = MatX::Zero(len, len);
    for (Index n = win.n_min(); n <= win.n_max(); ++n) m(n - win.n_min(), n - win.n_min()) = d(n);
    return m;
}

// ---------------------------------------------------------------------------
// Trace pairing
// ---------------------------------------------------------------------------

struct PairingMap {
    enum class Kind { reflection, identity, table };
    Kind kind = Kind::identity;
    Index i0 = 0;
    std::map<Index, Index> entries;

    static PairingMap reflection(Index i0) { return PairingMap{Kind::reflection, i0, {}}; }
    static PairingMap identity() { return PairingMap{}; }
    static PairingMap table(std::map<Index, Index> entries) { return PairingMap{Kind::table, 0, std::move(entries)}; }

    std::optional<Index> operator()(Index n) const {
        switch (kind) {
        case Kind::reflection: return -(n + i0);
        case Kind::identity: return n;
        case Kind::table:
            if (auto it = entries.find(n); it != entries.end()) return it->second;
            return std::nullopt;
        }
        return std::nullopt;
    }

    std::string describe() const {
        switch (kind) {
        case Kind::reflection: return "reflection(" + std::to_string(i0) + ")";
        case Kind::identity: return "identity";
        case Kind::table: return "table";
        }
        return "unknown";
    }
};

struct PairRecord {
    Index n;
    Index image;
    double deviation;  // |trace A_n - trace A_{g(n)}|
    bool satisfied;
};

struct TraceCollision {
    Index n;
    Index m;
    double deviation;
};

struct PairingReport {
    bool holds = true;
    std::optional<bool> exclusive;  // reflection maps only
    std::vector<PairRecord> pairs;
    std::vector<TraceCollision> collisions;
    Index skipped = 0;
    double max_deviation = 0.0;
    std::optional<Index> first_failure;
};

inline std::vector<double> window_traces(const BlockShiftSpec& s, const Window& win) {
    std::vector<double> tr;
    tr.reserve(static_cast<std::size_t>(win.length()));
    for (Index n = win.n_min(); n <= win.n_max(); ++n) tr.push_back(trace_A(s, n));
    return tr;
}

/// trace A_n = trace A_{g(n)} on the window; for reflections also checks that
/// equal traces occur only at paired indices.
inline PairingReport trace_pairing(const BlockShiftSpec& s, const PairingMap& g, const Window& win,
                                   double tol = default_tol) {
    PairingReport rep;
    const std::vector<double> tr = window_traces(s, win);
    auto at = [&](Index n) { return tr[static_cast<std::size_t>(n - win.n_min())]; };

    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        const auto m = g(n);
        if (!m || !win.contains(*m)) {
            ++rep.skipped;
            continue;
        }
        const double dev = std::abs(at(n) - at(*m));
        const bool ok = close(at(n), at(*m), tol);
        rep.pairs.push_back({n, *m, dev, ok});
        rep.max_deviation = std::max(rep.max_deviation, dev);
        if (!ok && rep.holds) {
            rep.holds = false;
            rep.first_failure = n;
        }
    }

    if (g.kind == PairingMap::Kind::reflection) {
        // sort by trace, then sweep neighbours that are within tolerance
        std::vector<Index> order;
        for (Index n = win.n_min(); n <= win.n_max(); ++n) order.push_back(n);
        std::sort(order.begin(), order.end(), [&](Index a, Index b) { return at(a) < at(b) || (at(a) == at(b) && a < b); });
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                const Index a = order[i];
                const Index b = order[j];
                if (!close(at(a), at(b), tol)) break;
                if (g(a) == b) continue;
                rep.collisions.push_back({std::min(a, b), std::max(a, b), std::abs(at(a) - at(b))});
            }
        }
        std::sort(rep.collisions.begin(), rep.collisions.end(),
                  [](const TraceCollision& x, const TraceCollision& y) { return std::pair(x.n, x.m) < std::pair(y.n, y.m); });
        rep.exclusive = rep.collisions.empty();
    }
    if (rep.pairs.empty()) rep.holds = false;
    return rep;
}

struct ReflectionSearch {
    std::optional<Index> i0;
    PairingReport report;
};

/// Searches reflection(i0) for i0 in [lo, hi]; prefers exclusive pairings, then
/// smallest |i0|, then smallest i0.
inline ReflectionSearch find_reflection(const BlockShiftSpec& s, const Window& win, double tol = default_tol,
                                        Index lo = -8, Index hi = 8) {
    ReflectionSearch best;
    auto rank = [](const PairingReport& r, Index i0) { return std::tuple(!r.exclusive.value_or(false), std::abs(i0), i0); };
    for (Index i0 = lo; i0 <= hi; ++i0) {
        PairingReport r = trace_pairing(s, PairingMap::reflection(i0), win, tol);
        if (!r.holds) continue;
        if (!best.i0 || rank(r, i0) < rank(best.report, *best.i0)) {
            best.i0 = i0;
            best.report = std::move(r);
        }
    }
    return best;
}

}  // namespace blockshift_lab

#endif  // BLOCKSHIFT_LAB_BLOCKSHIFT_HPP
