#ifndef BLOCKSHIFT_LAB_ORACLE_HPP
#define BLOCKSHIFT_LAB_ORACLE_HPP

// Brute-force cross-checks. Everything here goes through dense matrix
// arithmetic so it can be compared against the hand-written closed forms.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "blockshift_lab/blockshift.hpp"
#include "blockshift_lab/kernels.hpp"
#include "blockshift_lab/types.hpp"

namespace blockshift_lab {

inline double max_abs(const MatX& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double spectral_norm(const MatX& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<MatX> svd(m);
    return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------
// Gram matrices and the local commutator
// ---------------------------------------------------------------------------

enum class GramForm { one_parameter, unimodular, general };

inline std::string to_string(GramForm f) {
    switch (f) {
    case GramForm::one_parameter: return "one-parameter";
    case GramForm::unimodular: return "unimodular";
    case GramForm::general: return "general";
    }
    return "unknown";
}

/// A_n, B_n from the displayed entry formulas of the appropriate class.
inline GramPair closed_form_gram(const BlockShiftSpec& s, Index n, GramForm form) {
    Mat2 a, b;
    switch (form) {
    case GramForm::one_parameter: {
        const cplx t = s.w(n), tp = s.w(n - 1);
        const cplx c = s.d(n + 1) / t - s.d(n) * t;
        const cplx cp = s.d(n) / tp - s.d(n - 1) * tp;
        const cplx a12 = s.d(n + 1) * std::conj(t) / t - s.d(n) * std::norm(t);
        const cplx b12 = s.d(n) / std::norm(tp) - s.d(n - 1) * tp / std::conj(tp);
        a << std::norm(t), a12, std::conj(a12), std::norm(c) + 1.0 / std::norm(t);
        b << std::norm(tp) + std::norm(cp), b12, std::conj(b12), 1.0 / std::norm(tp);
        break;
    }
    case GramForm::unimodular: {
        const cplx a12 = std::conj(s.w(n)) * s.d(n + 1) * s.v(n) - s.d(n);
        const cplx b12 = s.d(n) - s.d(n - 1) * s.w(n - 1) * std::conj(s.v(n - 1));
        const double ep = std::norm(s.d(n) * s.v(n - 1) - s.d(n - 1) * s.w(n - 1));
        a << 1.0, a12, std::conj(a12), 1.0 + std::norm(s.d(n + 1) * s.v(n) - s.d(n) * s.w(n));
        b << 1.0 + ep, b12, std::conj(b12), 1.0;
        break;
    }
    case GramForm::general: {
        const cplx w = s.w(n), v = s.v(n), wp = s.w(n - 1), vp = s.v(n - 1);
        const cplx e = s.d(n + 1) * v - s.d(n) * w;
        const cplx ep = s.d(n) * vp - s.d(n - 1) * wp;
        a << std::norm(w), std::conj(w) * e, std::conj(e) * w, std::norm(e) + std::norm(v);
        b << std::norm(wp) + std::norm(ep), ep * std::conj(vp), std::conj(ep) * vp, std::norm(vp);
        break;
    }
    }
    return GramPair{n, a, b};
}

inline GramForm detect_gram_form(const BlockShiftSpec& s, Index n, double tol = default_tol) {
    if (s.class_td()) return GramForm::one_parameter;
    auto unit = [&](Index k) { return close(std::abs(s.w(k)), 1.0, tol) && close(std::abs(s.v(k)), 1.0, tol); };
    if (unit(n) && unit(n - 1)) return GramForm::unimodular;
    return GramForm::general;
}

struct GramCheck {
    GramForm form;
    double deviation_A;  // max entry deviation over max(1, max |entry|)
    double deviation_B;
    double max_deviation() const { return std::max(deviation_A, deviation_B); }
};

inline GramCheck dense_gram_check(const BlockShiftSpec& s, Index n) {
    const GramForm form = detect_gram_form(s, n);
    const GramPair closed = closed_form_gram(s, n, form);
    const GramPair direct = local_gram(s, n);
    return GramCheck{form, max_abs(closed.A - direct.A) / magnitude_scale(max_abs(direct.A)),
                     max_abs(closed.B - direct.B) / magnitude_scale(max_abs(direct.B))};
}

inline Mat2 commutator_direct(const BlockShiftSpec& s, Index n) {
    const GramPair g = local_gram(s, n);
    return g.A * g.B - g.B * g.A;
}

// ---------------------------------------------------------------------------
// T = S^{-1} (T0 + T1) S with S = [[I, -X], [0, I]]
// ---------------------------------------------------------------------------

struct IdentityCheck {
    double interior_deviation = 0.0;
    double full_deviation = 0.0;
    Index interior_size = 0;  // interior indices per component
};

/// Component-major permutation of an interleaved block truncation.
inline MatX to_component_major(const TruncatedOperator& op) {
    const auto len = static_cast<Eigen::Index>(op.win.length());
    Eigen::VectorXi perm(2 * len);
    for (Eigen::Index k = 0; k < len; ++k) {
        perm(2 * k) = static_cast<int>(k);
        perm(2 * k + 1) = static_cast<int>(len + k);
    }
    const Eigen::PermutationMatrix<Eigen::Dynamic> p(perm);
    return p * op.m * p.transpose();
}

inline IdentityCheck similarity_identity_check(const BlockShiftSpec& s, const Window& win, Index band = 2) {
    if (win.length() < 4) throw ConfigError("similarity_identity_check: window length must be >= 4");
    const auto len = static_cast<Eigen::Index>(win.length());
    const MatX t = to_component_major(truncate(s, win, TruncationMode::hard));
    const MatX t0 = truncate_shift(s.w, win, TruncationMode::hard);
    const MatX t1 = truncate_shift(s.v, win, TruncationMode::hard);
    const MatX x = truncate_diagonal(s.d, win);
    const MatX id = MatX::Identity(len, len);

    MatX sm = MatX::Zero(2 * len, 2 * len);
    sm.topLeftCorner(len, len) = id;
    sm.topRightCorner(len, len) = -x;
    sm.bottomRightCorner(len, len) = id;
    MatX direct_sum = MatX::Zero(2 * len, 2 * len);
    direct_sum.topLeftCorner(len, len) = t0;
    direct_sum.bottomRightCorner(len, len) = t1;
    const MatX sinv = sm.partialPivLu().solve(MatX::Identity(2 * len, 2 * len));
    const MatX diff = t - sinv * direct_sum * sm;

    IdentityCheck out;
    out.full_deviation = max_abs(diff);
    std::vector<Eigen::Index> interior;
    for (Index n = win.n_min(); n <= win.n_max(); ++n)
        if (win.edge_distance(n) >= band) interior.push_back(static_cast<Eigen::Index>(n - win.n_min()));
    out.interior_size = static_cast<Index>(interior.size());
    for (int ci = 0; ci < 2; ++ci)
        for (Eigen::Index r : interior)
            for (int cj = 0; cj < 2; ++cj)
                for (Eigen::Index c : interior)
                    out.interior_deviation =
                        std::max(out.interior_deviation, std::abs(diff(ci * len + r, cj * len + c)));
    return out;
}

// ---------------------------------------------------------------------------
// Unitary conjugation: W = S^{-1} (U + V)^{-1} S is unitary iff X V^{-1} = U^{-1} X
// ---------------------------------------------------------------------------

struct ConjugationReport {
    bool conjugation_unitary = false;
    double unitarity_residual = 0.0;      // max |W*W - I|
    double intertwining_residual = 0.0;   // max |X V^{-1} - U^{-1} X|
    double unitarity_norm = 0.0;          // spectral norm of W*W - I
    double intertwining_norm = 0.0;       // spectral norm of X V^{-1} - U^{-1} X
    bool intertwines = false;
    bool iff_holds = false;
};

inline ConjugationReport unitary_conjugation_check(const MatX& u, const MatX& v, const MatX& x, double tol = 1e-10) {
    if (u.rows() != u.cols() || v.rows() != v.cols()) throw ConfigError("unitary_conjugation_check: U, V must be square");
    if (x.rows() != u.rows() || x.cols() != v.rows()) throw ConfigError("unitary_conjugation_check: X must be dim U x dim V");
    auto unitary = [&](const MatX& m) {
        return max_abs(m.adjoint() * m - MatX::Identity(m.rows(), m.cols())) <= tol;
    };
    if (!unitary(u) || !unitary(v)) throw ConfigError("unitary_conjugation_check: U and V must be unitary");

    const Eigen::Index p = u.rows(), q = v.rows();
    const MatX uinv = u.partialPivLu().inverse();
    const MatX vinv = v.partialPivLu().inverse();
    MatX sm = MatX::Identity(p + q, p + q);
    sm.topRightCorner(p, q) = -x;
    MatX sinv = MatX::Identity(p + q, p + q);
    sinv.topRightCorner(p, q) = x;
    MatX inv_sum = MatX::Zero(p + q, p + q);
    inv_sum.topLeftCorner(p, p) = uinv;
    inv_sum.bottomRightCorner(q, q) = vinv;
    const MatX w = sinv * inv_sum * sm;

    ConjugationReport r;
    const MatX gram_defect = w.adjoint() * w - MatX::Identity(p + q, p + q);
    const MatX inter = x * vinv - uinv * x;
    r.unitarity_residual = max_abs(gram_defect);
    r.intertwining_residual = max_abs(inter);
    r.unitarity_norm = spectral_norm(gram_defect);
    r.intertwining_norm = spectral_norm(inter);
    // ||W*W - I|| lies between ||E|| and ||E|| + ||E||^2 for E the intertwining defect
    r.conjugation_unitary = r.unitarity_norm <= tol;
    r.intertwines = r.intertwining_norm <= tol;
    r.iff_holds = r.conjugation_unitary == r.intertwines;
    return r;
}

// ---------------------------------------------------------------------------
// Mobius functional calculus phi(M) = e^{i theta} (M - a I)(I - conj(a) M)^{-1}
// ---------------------------------------------------------------------------

inline MatX mobius_of_matrix(const MobiusMap& phi, const MatX& m, double tol = 1e-10) {
    if (m.rows() != m.cols()) throw ConfigError("mobius_of_matrix: matrix must be square");
    const Eigen::Index n = m.rows();
    const MatX id = MatX::Identity(n, n);
    const MatX den = id - std::conj(phi.a()) * m;
    const MatX num = m - phi.a() * id;
    Eigen::FullPivLU<MatX> lu(den);
    if (!lu.isInvertible()) throw DomainError("mobius_of_matrix: I - conj(a) M is singular (spectrum obstruction)");
    // numerator and resolvent commute, so left division is the same function of M
    const MatX y = lu.solve(num);
    const double scale = std::max(1.0, spectral_norm(m));
    if (max_abs(den * y - num) > tol * scale)
        throw DomainError("mobius_of_matrix: solve residual too large (spectrum near 1/conj(a))");
    return std::polar(1.0, phi.theta()) * y;
}

// ---------------------------------------------------------------------------
// Reducing subspace search
// ---------------------------------------------------------------------------

struct ReducingOptions {
    double tol = 1e-10;
    /// basis positions at each end treated as boundary (0: no filter)
    Eigen::Index boundary_band = 0;
    double boundary_mass_threshold = 0.5;
    Eigen::Index max_size = 256;
};

struct ReducingReport {
    Eigen::Index commutant_dim = 0;  // dimension of {Y : YM = MY, YM* = M*Y}
    std::optional<MatX> projection;
    double idempotent_residual = 0.0;
    double selfadjoint_residual = 0.0;
    double commute_residual = 0.0;
    double boundary_mass = 0.0;
    bool boundary_artifact = false;
    std::vector<std::string> notes;
};

namespace detail {

/// Gram of Y -> (MY - YM, M*Y - YM*) on block-diagonal unknowns Y_ab, (a,b) in `pairs`.
inline MatX commutation_gram(const MatX& m, const std::vector<std::pair<Eigen::Index, Eigen::Index>>& pairs) {
    const MatX ma = m.adjoint();
    const MatX mam = ma * m;
    const MatX mma = m * ma;
    const auto k = static_cast<Eigen::Index>(pairs.size());
    MatX g = MatX::Zero(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        const auto [a, b] = pairs[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < k; ++c) {
            const auto [a2, b2] = pairs[static_cast<std::size_t>(c)];
            cplx val = 0.0;
            // term from M
            if (b == b2) val += mam(a, a2);
            val -= m(b2, b) * ma(a, a2);
            val -= ma(b2, b) * m(a, a2);
            if (a == a2) val += mma(b2, b);
            // term from M*
            if (b == b2) val += mma(a, a2);
            val -= ma(b2, b) * m(a, a2);
            val -= m(b2, b) * ma(a, a2);
            if (a == a2) val += mam(b2, b);
            g(r, c) = val;
        }
    }
    return g;
}

inline double band_mass(const MatX& p, Eigen::Index band) {
    if (band <= 0) return 0.0;
    const Eigen::Index n = p.rows();
    double total = 0.0, edge = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = std::norm(p(i, j));
            total += v;
            const bool bi = i < band || i >= n - band;
            const bool bj = j < band || j >= n - band;
            if (bi || bj) edge += v;
        }
    return total > 0.0 ? edge / total : 0.0;
}

}  // namespace detail

/// Explicit Kronecker form of the same Gram, for small sizes (verification aid).
inline MatX commutation_gram_kron(const MatX& m) {
    const Eigen::Index n = m.rows();
    const MatX id = MatX::Identity(n, n);
    auto kron = [](const MatX& a, const MatX& b) {
        MatX out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    };
    // column-major vec: vec(MY - YM) = (I kron M - M^T kron I) vec(Y)
    const MatX l1 = kron(id, m) - kron(m.transpose(), id);
    const MatX ma = m.adjoint();
    const MatX l2 = kron(id, ma) - kron(ma.transpose(), id);
    return l1.adjoint() * l1 + l2.adjoint() * l2;
}

inline MatX commutation_gram_full(const MatX& m) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index b = 0; b < m.rows(); ++b)
        for (Eigen::Index a = 0; a < m.rows(); ++a) pairs.emplace_back(a, b);
    return detail::commutation_gram(m, pairs);
}

inline ReducingReport reducing_search(const MatX& m, const ReducingOptions& opt = {}) {
    if (m.rows() != m.cols()) throw ConfigError("reducing_search: matrix must be square");
    const Eigen::Index n = m.rows();
    if (n > opt.max_size) throw BudgetError("reducing_search: size " + std::to_string(n) + " exceeds budget");
    ReducingReport rep;
    const double mnorm = std::max(1.0, spectral_norm(m));
    const MatX ma = m.adjoint();

    // Every Y commuting with M and M* commutes with this Hermitian element of
    // C*(M), so Y is block diagonal over its eigenvalue clusters.
    const double c2 = 0.6180339887498949, c3 = 0.4142135623730950;
    const MatX z = ma * m + c2 * (m + ma) + cplx(0.0, c3) * (m - ma);
    Eigen::SelfAdjointEigenSolver<MatX> zs((z + z.adjoint()) / 2.0);
    const MatX q = zs.eigenvectors();
    const Eigen::VectorXd ev = zs.eigenvalues();
    const double cluster_tol = 1e-6 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> cluster_start{0};
    for (Eigen::Index i = 1; i < n; ++i)
        if (ev(i) - ev(i - 1) > cluster_tol) cluster_start.push_back(i);
    cluster_start.push_back(n);

    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (std::size_t c = 0; c + 1 < cluster_start.size(); ++c)
        for (Eigen::Index b = cluster_start[c]; b < cluster_start[c + 1]; ++b)
            for (Eigen::Index a = cluster_start[c]; a < cluster_start[c + 1]; ++a) pairs.emplace_back(a, b);
    if (pairs.size() > 4096) throw BudgetError("reducing_search: block-diagonal ansatz too large");

    const MatX mt = q.adjoint() * m * q;
    const MatX g = detail::commutation_gram(mt, pairs);
    Eigen::SelfAdjointEigenSolver<MatX> gs((g + g.adjoint()) / 2.0);
    const double null_tol = 1e-8 * std::max(1.0, gs.eigenvalues().cwiseAbs().maxCoeff());

    std::vector<MatX> hermitian;
    for (Eigen::Index k = 0; k < gs.eigenvalues().size(); ++k) {
        if (gs.eigenvalues()(k) > null_tol) break;
        MatX yt = MatX::Zero(n, n);
        for (std::size_t p = 0; p < pairs.size(); ++p)
            yt(pairs[p].first, pairs[p].second) = gs.eigenvectors()(static_cast<Eigen::Index>(p), k);
        const MatX y = q * yt * q.adjoint();
        const double res = std::max(max_abs(m * y - y * m), max_abs(ma * y - y * ma));
        if (res > opt.tol * mnorm) {
            rep.notes.push_back("rejected near-null vector, residual " + std::to_string(res));
            continue;
        }
        ++rep.commutant_dim;
        hermitian.push_back((y + y.adjoint()) / 2.0);
        hermitian.push_back((y - y.adjoint()) / cplx(0.0, 2.0));
    }
    if (rep.commutant_dim <= 1) {
        rep.notes.push_back("commutant consists of scalars on this truncation");
        return rep;
    }

    // a fixed combination of the traceless Hermitian parts
    MatX h = MatX::Zero(n, n);
    const MatX id = MatX::Identity(n, n);
    for (std::size_t k = 0; k < hermitian.size(); ++k) {
        MatX part = hermitian[k] - (hermitian[k].trace() / static_cast<double>(n)) * id;
        const double nrm = part.norm();
        if (nrm < 1e-12) continue;
        h += (1.0 + 0.37 * static_cast<double>(k) + 0.011 * static_cast<double>(k * k)) / nrm * part;
    }
    Eigen::SelfAdjointEigenSolver<MatX> hs((h + h.adjoint()) / 2.0);
    const Eigen::VectorXd hv = hs.eigenvalues();
    const double gap_tol = 1e-6 * std::max(1.0, hv.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> gaps;
    for (Eigen::Index i = 1; i < n; ++i)
        if (hv(i) - hv(i - 1) > gap_tol) gaps.push_back(i);
    if (gaps.empty()) {
        rep.notes.push_back("Hermitian commutant elements are scalar");
        return rep;
    }
    // split at the gap closest to the middle of the spectrum
    Eigen::Index split = gaps.front();
    for (Eigen::Index gpos : gaps)
        if (std::abs(2 * gpos - n) < std::abs(2 * split - n)) split = gpos;
    const MatX v = hs.eigenvectors().leftCols(split);
    MatX p = v * v.adjoint();

    rep.idempotent_residual = max_abs(p * p - p);
    rep.selfadjoint_residual = max_abs(p - p.adjoint());
    rep.commute_residual = max_abs(m * p - p * m);
    const double cert = 10.0 * opt.tol * mnorm;
    if (rep.idempotent_residual > cert || rep.selfadjoint_residual > cert || rep.commute_residual > cert) {
        rep.notes.push_back("spectral projection failed certification");
        return rep;
    }
    const MatX smaller = split <= n - split ? p : MatX(id - p);
    rep.boundary_mass = detail::band_mass(smaller, opt.boundary_band);
    if (rep.boundary_mass > opt.boundary_mass_threshold) {
        rep.boundary_artifact = true;
        rep.notes.push_back("projection concentrated in boundary band: tagged artifact");
        return rep;
    }
    rep.projection = std::move(p);
    return rep;
}

}  // namespace blockshift_lab

#endif  // BLOCKSHIFT_LAB_ORACLE_HPP
