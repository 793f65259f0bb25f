#ifndef BLOCKSHIFT_LAB_IRREDUCIBILITY_HPP
#define BLOCKSHIFT_LAB_IRREDUCIBILITY_HPP

// Window-scoped sufficient conditions for irreducibility of the block shift.
//
// Every checker below reduces to the same mechanism: a reducing subspace K of T
// must meet each H(n), and inside H(n) it must be spanned by common eigenvectors
// of A_n = T_n*T_n and B_n = T_{n-1}T_{n-1}*. So T is irreducible once traces
// pair up exclusively (eigenvectors cannot leak across indices) and A_n, B_n fail
// to commute. Since T_n maps H(n) onto H(n+1) bijectively, a single index with a
// non-commuting pair suffices; indices where the obstruction vanishes are
// reported as flagged exceptions. CheckOptions::strict demands it at every index.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "blockshift_lab/blockshift.hpp"
#include "blockshift_lab/seqcore.hpp"
#include "blockshift_lab/types.hpp"

namespace blockshift_lab {

struct CheckOptions {
    double tol = default_tol;
    bool strict = false;
};

/// Closed-form entries of A_n B_n - B_n A_n for the class v = 1/w (w = t).
struct CommutatorEntries {
    Index n;
    cplx e11;            // (1,1) entry, X11 - conj(X11)
    cplx e21;            // (2,1) entry, X21 - conj(X12)
    cplx e21_statement;  // same expression with +1/|t_{n-1}|^2 in the first factor
    cplx lhs;            // t_n conj(c_n)(|t_{n-1}|^2 - 1/|t_{n-1}|^2 + |c_{n-1}|^2)
    cplx lhs_statement;  // t_n conj(c_n)(|t_{n-1}|^2 + 1/|t_{n-1}|^2 + |c_{n-1}|^2)
    cplx rhs;            // conj(c_{n-1})/t_{n-1} (|t_n|^2 - 1/|t_n|^2 - |c_n|^2)
    cplx x12;            // (A_n B_n)_{12}
    cplx x21;            // (A_n B_n)_{21}
    cplx c_n;
    cplx c_prev;
};

inline cplx td_c(const SequenceSpec& t, const SequenceSpec& d, Index n) { return d(n + 1) / t(n) - d(n) * t(n); }

inline CommutatorEntries commutator_entries(const BlockShiftSpec& s, Index n) {
    if (!s.class_td()) throw InapplicableError("commutator_entries: spec is not of the form v = 1/w");
    const SequenceSpec& t = s.w;
    const SequenceSpec& d = s.d;
    const cplx tn = t(n);
    const cplx tp = t(n - 1);
    const cplx c = td_c(t, d, n);
    const cplx cp = td_c(t, d, n - 1);
    const double an = std::norm(tn);
    const double ap = std::norm(tp);
    const double cn2 = std::norm(c);
    const double cp2 = std::norm(cp);

    CommutatorEntries e{};
    e.n = n;
    e.c_n = c;
    e.c_prev = cp;
    e.e11 = std::conj(tn) / tp * c * std::conj(cp) - tn / std::conj(tp) * std::conj(c) * cp;
    e.rhs = 1.0 / tp * std::conj(cp) * (an - 1.0 / an - cn2);
    e.lhs = tn * std::conj(c) * (ap - 1.0 / ap + cp2);
    e.lhs_statement = tn * std::conj(c) * (ap + 1.0 / ap + cp2);
    e.e21 = e.lhs - e.rhs;
    e.e21_statement = e.lhs_statement - e.rhs;
    e.x12 = an / std::conj(tp) * cp + std::conj(tn) / ap * c;
    e.x21 = (std::conj(d(n + 1)) * tn / std::conj(tn) - std::conj(d(n)) * an) * (ap + cp2) +
            (cn2 + 1.0 / an) * (std::conj(d(n)) / ap - std::conj(d(n - 1)) * std::conj(tp) / tp);
    return e;
}

namespace detail {

inline Witness witness(std::optional<Index> n, std::string clause, double value, double threshold, bool satisfied,
                       std::string note = {}) {
    return Witness{n, std::move(clause), value, threshold, satisfied, std::move(note)};
}

/// |a - b| > tol * max(1, |a|, |b|)
inline bool differs(cplx a, cplx b, double tol) { return !close(a, b, tol); }

inline double diff_threshold(cplx a, cplx b, double tol) {
    return tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Folds per-index obstruction results into the verdict under the >= 1 index /
/// strict every-index policy.
inline void fold_obstruction(Verdict& v, const std::vector<std::pair<Index, bool>>& per_index,
                             const CheckOptions& opt, const std::string& clause) {
    bool any = false;
    for (const auto& [n, ok] : per_index) {
        if (ok) {
            any = true;
            continue;
        }
        v.notes.push_back("flagged: " + clause + " fails at n=" + std::to_string(n));
        if (opt.strict) v.fail(n, clause);
    }
    if (!any && !per_index.empty()) {
        v.fail(per_index.front().first, clause + " (vanishes at every index)");
    }
}

inline void record_pairing(Verdict& v, const PairingReport& rep, const PairingMap& g) {
    for (const auto& p : rep.pairs)
        v.witnesses.push_back(witness(p.n, "pairing", p.deviation, 0.0, p.satisfied, "image " + std::to_string(p.image)));
    if (rep.skipped > 0)
        v.notes.push_back("pairing " + g.describe() + ": " + std::to_string(rep.skipped) +
                          " indices skipped (image outside window)");
}

inline void record_collisions(Verdict& v, const PairingReport& rep) {
    for (const auto& c : rep.collisions)
        v.notes.push_back("trace collision between n=" + std::to_string(c.n) + " and n=" + std::to_string(c.m) +
                          " (|diff| = " + std::to_string(c.deviation) + ")");
}

inline void check_not_identity(Verdict& v, const BlockShiftSpec& s, const Window& win, double tol) {
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        const double tr = trace_A(s, n);
        const bool ok = tr > 2.0 + tol;
        if (!ok) {
            v.witnesses.push_back(witness(n, "A_n != I", tr, 2.0 + tol, false));
            v.fail(n, "A_n != I");
        }
    }
}

}  // namespace detail

/// Real positive t with off-diagonal alpha (1/t_n - t_n): pairing under
/// n -> -(n+i0), exclusivity, positivity, t != 1 and the commutator obstruction
/// (t_n^2-1)(t_{n-1}^2-1) != (1/t_n^2-1)(1/t_{n-1}^2-1).
inline Verdict check_alpha_criterion(const SequenceSpec& t, cplx alpha, Index i0, const Window& win,
                                     const CheckOptions& opt = {}) {
    if (alpha == cplx(0.0)) return Verdict::inapplicable("alpha = 0");
    Verdict v;
    v.tolerances["tol"] = opt.tol;
    const BlockShiftSpec s = BlockShiftSpec::td(t, seq::constant(alpha));
    const PairingMap g = PairingMap::reflection(i0);

    const PairingReport pr = trace_pairing(s, g, win, opt.tol);
    detail::record_pairing(v, pr, g);
    if (!pr.holds) v.fail(pr.first_failure, "pairing");
    for (const auto& c : pr.collisions)
        v.witnesses.push_back(detail::witness(c.n, "exclusivity", c.deviation, opt.tol, false,
                                              "collides with n=" + std::to_string(c.m)));
    if (!pr.collisions.empty()) v.fail(pr.collisions.front().n, "exclusivity");

    std::vector<std::pair<Index, bool>> obstruction;
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        const cplx tn = t(n);
        const cplx tp = t(n - 1);
        const bool positive = !is_non_real(tn, opt.tol) && tn.real() > 0.0;
        v.witnesses.push_back(detail::witness(n, "t_n > 0", tn.real(), 0.0, positive));
        if (!positive) v.fail(n, "t_n > 0");

        const double inv_prev = 1.0 / tp.real();
        const bool prev_not_one = !close(inv_prev, 1.0, opt.tol);
        v.witnesses.push_back(detail::witness(n, "1/t_{n-1} != 1", std::abs(inv_prev - 1.0), opt.tol, prev_not_one));
        if (!prev_not_one) v.fail(n, "1/t_{n-1} != 1");

        const double x = tn.real() * tn.real();
        const double y = tp.real() * tp.real();
        const double lhs = (x - 1.0) * (y - 1.0);
        const double rhs = (1.0 / x - 1.0) * (1.0 / y - 1.0);
        const bool not_recip = !close(tn.real(), inv_prev, opt.tol);
        const bool obstructed = not_recip && !close(lhs, rhs, opt.tol);
        v.witnesses.push_back(detail::witness(n, "t_n != 1/t_{n-1}", std::abs(tn.real() - inv_prev), opt.tol, not_recip));
        v.witnesses.push_back(detail::witness(n, "commutator obstruction", std::abs(lhs - rhs),
                                              opt.tol * std::max({1.0, std::abs(lhs), std::abs(rhs)}), obstructed));
        obstruction.emplace_back(n, obstructed);
    }
    detail::fold_obstruction(v, obstruction, opt, "commutator obstruction");
    detail::record_collisions(v, pr);
    return v;
}

/// Complex t with general d: condition (1) Im(conj(t_n)/t_{n-1} c_n conj(c_{n-1})) != 0,
/// condition (2) the (2,1) commutator entry is nonzero.
inline Verdict check_complex_weights(const BlockShiftSpec& s, std::optional<PairingMap> g, const Window& win,
                                     const CheckOptions& opt = {}) {
    if (!s.class_td()) return Verdict::inapplicable("spec is not of the form v = 1/w");
    if (!g) {
        const ReflectionSearch found = find_reflection(s, win, opt.tol);
        if (!found.i0) return Verdict::inapplicable("no reflection pairing n -> -(n+i0), |i0| <= 8, holds on window");
        g = PairingMap::reflection(*found.i0);
    }
    const PairingReport pr = trace_pairing(s, *g, win, opt.tol);
    if (!pr.holds) {
        Verdict v = Verdict::inapplicable(
            "trace pairing " + g->describe() + " fails" +
            (pr.first_failure ? " at n=" + std::to_string(*pr.first_failure) : std::string(" (no pairs in window)")));
        v.fail_index = pr.first_failure;
        return v;
    }
    Verdict v;
    v.tolerances["tol"] = opt.tol;
    v.notes.push_back("pairing " + g->describe());
    detail::record_pairing(v, pr, *g);
    detail::check_not_identity(v, s, win, opt.tol);

    std::vector<std::pair<Index, bool>> per_index;
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        const CommutatorEntries e = commutator_entries(s, n);
        const cplx q = std::conj(s.w(n)) / s.w(n - 1) * e.c_n * std::conj(e.c_prev);
        const bool c1 = is_non_real(q, opt.tol);
        v.witnesses.push_back(detail::witness(n, "condition (1)", std::abs(q.imag()),
                                              opt.tol * magnitude_scale(std::abs(q)), c1));

        const bool c2 = detail::differs(e.lhs, e.rhs, opt.tol);
        const bool c2s = detail::differs(e.lhs_statement, e.rhs, opt.tol);
        v.witnesses.push_back(detail::witness(n, "condition (2)", std::abs(e.e21),
                                              detail::diff_threshold(e.lhs, e.rhs, opt.tol), c2));
        v.witnesses.push_back(detail::witness(n, "condition (2) statement sign", std::abs(e.e21_statement),
                                              detail::diff_threshold(e.lhs_statement, e.rhs, opt.tol), c2s,
                                              "reported only"));
        per_index.emplace_back(n, c1 || c2);
    }
    detail::fold_obstruction(v, per_index, opt, "conditions (1) and (2)");
    detail::record_collisions(v, pr);
    return v;
}

/// Unimodular weights |w| = |v| = 1: condition (1) Im(q) != 0 with
/// q = d_{n+1}c_n + d_n c_{n-1} - d_{n+1} conj(w_n) v_n c_{n-1}, c_n = conj(d_n w_n) v_n;
/// condition (2) compares the two sides whose difference is the (2,1) commutator entry.
struct UnimodularQuantities {
    cplx q1;
    cplx lhs2;            // (conj(d_{n+1}) w_n conj(v_n) - conj(d_n)) |e_{n-1}|^2
    cplx rhs2;            // (conj(d_{n-1} w_{n-1}) v_{n-1} - conj(d_n)) |e_n|^2
    cplx lhs2_statement;  // with conj(d_{n+1}) w_n v_n
};

inline UnimodularQuantities unimodular_quantities(const BlockShiftSpec& s, Index n) {
    auto c = [&](Index k) { return std::conj(s.d(k)) * std::conj(s.w(k)) * s.v(k); };
    const cplx dn1 = s.d(n + 1);
    const cplx dn = s.d(n);
    const cplx dp = s.d(n - 1);
    const cplx wn = s.w(n);
    const cplx vn = s.v(n);
    const cplx wp = s.w(n - 1);
    const cplx vp = s.v(n - 1);
    const double en = std::norm(coupling(s, n));
    const double ep = std::norm(coupling(s, n - 1));
    UnimodularQuantities q;
    q.q1 = dn1 * c(n) + dn * c(n - 1) - dn1 * std::conj(wn) * vn * c(n - 1);
    q.lhs2 = (std::conj(dn1) * wn * std::conj(vn) - std::conj(dn)) * ep;
    q.lhs2_statement = (std::conj(dn1) * wn * vn - std::conj(dn)) * ep;
    q.rhs2 = (std::conj(dp) * std::conj(wp) * vp - std::conj(dn)) * en;
    return q;
}

inline Verdict check_unimodular(const BlockShiftSpec& s, std::optional<PairingMap> g, const Window& win,
                                const CheckOptions& opt = {}) {
    for (Index n = win.n_min() - 1; n <= win.n_max(); ++n) {
        if (!close(std::abs(s.w(n)), 1.0, opt.tol) || !close(std::abs(s.v(n)), 1.0, opt.tol))
            return Verdict::inapplicable("weights not unimodular at n=" + std::to_string(n));
    }
    if (check_intertwining(s, win, opt.tol).degenerate)
        return Verdict::inapplicable("X T1 = T0 X on window (diagonal direct sum)");
    if (!g) {
        const ReflectionSearch found = find_reflection(s, win, opt.tol);
        if (!found.i0) return Verdict::inapplicable("no reflection pairing n -> -(n+i0), |i0| <= 8, holds on window");
        g = PairingMap::reflection(*found.i0);
    }
    Verdict v;
    v.tolerances["tol"] = opt.tol;
    v.notes.push_back("pairing " + g->describe() + " of |d_{n+1}v_n - d_n w_n|^2");
    const PairingReport pr = trace_pairing(s, *g, win, opt.tol);
    detail::record_pairing(v, pr, *g);
    if (!pr.holds) v.fail(pr.first_failure, "pairing");
    detail::check_not_identity(v, s, win, opt.tol);

    std::vector<std::pair<Index, bool>> per_index;
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        const UnimodularQuantities q = unimodular_quantities(s, n);
        const bool c1 = is_non_real(q.q1, opt.tol);
        v.witnesses.push_back(detail::witness(n, "condition (1)", std::abs(q.q1.imag()),
                                              opt.tol * magnitude_scale(std::abs(q.q1)), c1));
        const bool c2 = detail::differs(q.lhs2, q.rhs2, opt.tol);
        const bool c2s = detail::differs(q.lhs2_statement, q.rhs2, opt.tol);
        v.witnesses.push_back(detail::witness(n, "condition (2)", std::abs(q.lhs2 - q.rhs2),
                                              detail::diff_threshold(q.lhs2, q.rhs2, opt.tol), c2));
        v.witnesses.push_back(detail::witness(n, "condition (2) as displayed", std::abs(q.lhs2_statement - q.rhs2),
                                              detail::diff_threshold(q.lhs2_statement, q.rhs2, opt.tol), c2s,
                                              "reported only"));
        per_index.emplace_back(n, c1 || c2);
    }
    detail::fold_obstruction(v, per_index, opt, "conditions (1) and (2)");
    detail::record_collisions(v, pr);
    return v;
}

struct DecayOptionsGrid {
    Index k_max = 64;
    /// spacing of the (i, j) sample grid; 0 picks max(1, L/8)
    Index grid_step = 0;
    DecayOptions decay = {};
};

/// T0, T1 irreducible (weight moduli aperiodic on the window) and the ratio
/// products prod |w_{j+m}| / |v_{i+m}| decay for every sampled (i, j).
inline Verdict check_decay_criterion(const BlockShiftSpec& s, const Window& win, const DecayOptionsGrid& grid = {},
                                     const CheckOptions& opt = {}) {
    const PeriodicityReport pw = is_modulus_periodic(s.w, win, opt.tol);
    const PeriodicityReport pv = is_modulus_periodic(s.v, win, opt.tol);
    if (!pw.applicable) return Verdict::inapplicable(pw.note);
    if (pw.periodic) return Verdict::inapplicable("w modulus periodic with period " + std::to_string(*pw.period));
    if (pv.periodic) return Verdict::inapplicable("v modulus periodic with period " + std::to_string(*pv.period));
    if (check_intertwining(s, win, opt.tol).degenerate)
        return Verdict::inapplicable("X T1 = T0 X on window (diagonal direct sum)");

    Verdict v;
    v.tolerances["tol"] = opt.tol;
    v.tolerances["slope_threshold"] = grid.decay.slope_threshold;
    v.tolerances["k_max"] = static_cast<double>(grid.k_max);
    v.witnesses.push_back(detail::witness(std::nullopt, "w aperiodic", pw.max_deviation, opt.tol, true, pw.note));
    v.witnesses.push_back(detail::witness(std::nullopt, "v aperiodic", pv.max_deviation, opt.tol, true, pv.note));

    const Index step = grid.grid_step > 0 ? grid.grid_step : std::max<Index>(1, win.length() / 8);
    v.tolerances["grid_step"] = static_cast<double>(step);
    for (Index i = win.n_min(); i <= win.n_max(); i += step) {
        for (Index j = win.n_min(); j <= win.n_max(); j += step) {
            const DecayReport r = ratio_product_decay(s.w, s.v, i, j, grid.k_max, grid.decay);
            v.witnesses.push_back(detail::witness(i, "decay", r.log_slope, grid.decay.slope_threshold, r.decays,
                                                  "j=" + std::to_string(j)));
            if (!r.decays) v.fail(i, "decay (i=" + std::to_string(i) + ", j=" + std::to_string(j) + ")");
        }
    }
    return v;
}

}  // namespace blockshift_lab

#endif  // BLOCKSHIFT_LAB_IRREDUCIBILITY_HPP
