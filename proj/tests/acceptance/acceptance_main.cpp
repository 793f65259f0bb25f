// Acceptance runner: one PASS/FAIL line per criterion. Tolerances are fixed here
// and are not configurable from the command line.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "blockshift_lab/blockshift_lab.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace bl = blockshift_lab;
using bl::cplx;
using bl::MatX;
namespace seq = bl::seq;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

double rel(cplx a, cplx b) { return std::abs(a - b) / bl::magnitude_scale(std::abs(b)); }

bl::SequenceSpec odd_negation_t() { return seq::sqrt_abs_quotient(seq::affine(0.3), seq::affine(0.7)); }

bl::BlockShiftSpec unimodular_example() {
    return bl::BlockShiftSpec::td(seq::mobius_rational(0.5, 0.5, cplx(0.0, 1.0)), seq::constant(1.0));
}

bool has_note(const bl::Verdict& v, const std::string& needle) {
    for (const auto& n : v.notes)
        if (n.find(needle) != std::string::npos) return true;
    return false;
}

Outcome closed_form_agreement() {
    const auto t0 = Clock::now();
    testgen::Gen g(1001);
    double comm = 0.0, gram = 0.0;
    int samples = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto s = g.class_td(-4, 4);
        const bl::Index n = g.integer(-3, 3);
        const auto e = bl::commutator_entries(s, n);
        const auto d = bl::commutator_direct(s, n);
        comm = std::max({comm, rel(e.e11, d(0, 0)), rel(e.e21, d(1, 0))});
        gram = std::max(gram, bl::dense_gram_check(s, n).max_deviation());
        ++samples;
    }
    const double secs = seconds_since(t0);
    return {comm <= 1e-12 && gram <= 1e-12 && secs < 5.0,
            std::to_string(samples) + " samples, commutator dev " + fmt(comm) + ", gram dev " + fmt(gram) + ", " +
                fmt(secs) + " s"};
}

Outcome unit_determinant() {
    testgen::Gen g(1002);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto s = g.class_td(-3, 3);
        const bl::Index n = g.integer(-2, 2);
        const auto ref = oracle_ref::gram(s.w, s.v, s.d, n);
        worst = std::max(worst, std::abs(oracle_ref::det(ref.A) - 1.0));
    }
    return {worst <= 1e-12, "max |det A_n - 1| = " + fmt(worst)};
}

Outcome odd_negation_example() {
    const auto s = bl::BlockShiftSpec::td(odd_negation_t(), seq::constant(1.0));
    const bl::Window win(-40, 40);
    const auto pr = bl::trace_pairing(s, bl::PairingMap::reflection(1), win);
    const auto v = bl::check_alpha_criterion(odd_negation_t(), 1.0, 1, win);
    const bool exclusive = pr.exclusive.value_or(false);
    return {pr.holds && pr.max_deviation <= 1e-10 && exclusive && v.status == bl::Status::holds_on_window,
            "pairing dev " + fmt(pr.max_deviation) + ", exclusive " + (exclusive ? "yes" : "no") + ", alpha criterion " +
                bl::to_string(v.status)};
}

Outcome unimodular_example_case() {
    const auto s = unimodular_example();
    const bl::Window win(-40, 40);
    const auto pr = bl::trace_pairing(s, bl::PairingMap::reflection(1), win);
    double min_im = 1e300;
    for (bl::Index n = win.n_min(); n <= win.n_max(); ++n)
        if (n != 0) min_im = std::min(min_im, std::abs(bl::commutator_entries(s, n).e11.imag()));
    const auto v = bl::check_complex_weights(s, bl::PairingMap::reflection(1), win);
    const bool flagged = has_note(v, "n=0");
    return {pr.holds && min_im > 1e-10 && flagged && v.holds(),
            std::string("pairing ") + (pr.holds ? "holds" : "fails") + ", min |Im e11| (n != 0) = " + fmt(min_im) +
                ", n=0 flagged " + (flagged ? "yes" : "no")};
}

Outcome curvature_grid() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    int points = 0;
    for (double lam : {0.5, 1.0, 2.0, 3.7}) {
        const auto k = bl::KernelSpec::lambda(lam);
        for (int i = -16; i <= 16; ++i)
            for (int j = -16; j <= 16; ++j) {
                const cplx w(0.05 * i, 0.05 * j);
                if (std::abs(w) > 0.8 + 1e-12) continue;
                const double expect = oracle_ref::lambda_curvature(lam, w);
                worst = std::max(worst, std::abs(bl::curvature(k, w) - expect));
                ++points;
            }
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-6 && secs < 10.0,
            std::to_string(points) + " points, max error " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome similarity_identity() {
    testgen::Gen g(1006);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial)
        worst = std::max(worst, bl::similarity_identity_check(g.general(-14, 14), bl::Window(-12, 12)).interior_deviation);
    return {worst <= 1e-13, "max interior deviation " + fmt(worst)};
}

Outcome reducing_concordance() {
    bl::ReducingOptions opt;
    opt.tol = 1e-9;
    const MatX periodic = bl::truncate_shift(seq::periodic({1.0, 2.0}), bl::Window(0, 7), bl::TruncationMode::circulant);
    const auto a = bl::reducing_search(periodic, opt);
    bool certified = false;
    if (a.projection) {
        const double rank = a.projection->trace().real();
        certified = a.idempotent_residual <= 1e-9 && a.selfadjoint_residual <= 1e-9 && a.commute_residual <= 1e-9 &&
                    rank > 0.5 && rank < static_cast<double>(periodic.rows()) - 0.5;
    }
    const auto op = bl::truncate(unimodular_example(), bl::Window(-6, 6), bl::TruncationMode::hard);
    opt.boundary_band = 4;
    const auto b = bl::reducing_search(op.m, opt);
    const bool none = !b.projection.has_value();
    return {certified && none, std::string("circulant projection ") + (certified ? "certified" : "missing") +
                                   ", hard truncation interior projection " + (none ? "none" : "found")};
}

Outcome metric_det_bound() {
    const auto k1 = bl::KernelSpec::lambda(2.0);
    bl::EvalOptions opt;
    opt.radius_limit = 0.9;
    double lo = 1e300, hi = -1e300, worst_r = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double r = 0.9 * i / 49.0;
        const double ratio = bl::metric_det_ratio(1.0, k1, seq::constant(1.0), cplx(r, 0.0), opt).ratio;
        lo = std::min(lo, ratio);
        if (ratio > hi) {
            hi = ratio;
            worst_r = r;
        }
    }
    return {lo >= 1.0 - 1e-9 && hi <= 2.0 + 1e-9,
            "ratio range [" + fmt(lo) + ", " + fmt(hi) + "] (max at |w| = " + fmt(worst_r) + "), required [1, 2]"};
}

Outcome shields() {
    const bl::Window win(-40, 40);
    const auto t = odd_negation_t();
    const auto same = bl::shields_diagnostic(t, t, 0, 0, win);
    const auto div = bl::shields_diagnostic(seq::constant(1.0), seq::constant(2.0), -4, 4, win);
    testgen::Gen g(1009);
    std::map<bl::Index, cplx> w, v;
    for (bl::Index n = -60; n <= 60; ++n) w[n] = g.uniform(0.5, 2.0);
    for (bl::Index n = -60; n <= 57; ++n) v[n] = std::polar(std::abs(w[n + 3]), g.uniform(-3.0, 3.0));
    const auto shifted = bl::shields_diagnostic(seq::table(w), seq::table(v), -5, 5, win);
    const bool ok = same.spread == 1.0 && div.verdict == bl::ShieldsVerdict::diverging &&
                    shifted.verdict == bl::ShieldsVerdict::bounded_on_window && shifted.k == 3;
    return {ok, "identical spread " + fmt(same.spread) + ", constant 1 vs 2 " + bl::to_string(div.verdict) +
                    ", shifted copy " + bl::to_string(shifted.verdict) + " at k = " + std::to_string(shifted.k)};
}

Outcome jk_positivity() {
    const std::vector<cplx> pts = {{0.0, 0.0}, {0.3, 0.1}, {-0.2, 0.4}, {0.5, -0.3}, {-0.45, -0.25}, {0.1, 0.6}};
    const auto k1 = bl::KernelSpec::lambda(1.0);
    const auto k2 = bl::KernelSpec::lambda(2.0);
    const auto g1 = bl::sampled_gram(bl::jk_kernel(k1, k1, 1), pts);
    const auto g2 = bl::sampled_gram(bl::jk_kernel(k1, k2, 2), pts);
    const auto j0 = bl::jk_kernel(k1, k2, 0);
    double dev = 0.0;
    for (cplx z : pts)
        for (cplx w : pts) {
            const cplx product = std::pow(1.0 - z * std::conj(w), -3.0);
            dev = std::max(dev, std::abs(j0(z, w)(0, 0) - product));
        }
    return {g1.min_eigenvalue >= -1e-9 && g2.min_eigenvalue >= -1e-9 && dev <= 1e-12,
            "min eigenvalues " + fmt(g1.min_eigenvalue) + ", " + fmt(g2.min_eigenvalue) + ", J0 deviation " + fmt(dev)};
}

Outcome unitary_iff() {
    testgen::Gen g(1011);
    const double tol = 1e-10;
    int agree = 0, total = 0, unitary = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<Eigen::Index>(g.integer(1, 8));
        const MatX u = g.unitary(n);
        const MatX q = g.unitary(n);
        const bool intertwined = trial % 2 == 0;
        const MatX v = intertwined ? MatX(q.adjoint() * u * q) : g.unitary(n);
        const MatX x = intertwined ? q : g.matrix(n);
        const auto r = bl::unitary_conjugation_check(u, v, x, tol);
        agree += r.conjugation_unitary == (r.intertwining_residual <= tol);
        unitary += r.conjugation_unitary;
        ++total;
    }
    return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agree (" + std::to_string(unitary) +
                                " unitary conjugations)"};
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>>& criteria() {
    static const std::map<int, std::pair<std::string, std::function<Outcome()>>> table = {
        {1, {"closed-form and oracle agreement", closed_form_agreement}},
        {2, {"unit determinant of A_n", unit_determinant}},
        {3, {"odd-negation example", odd_negation_example}},
        {4, {"unimodular example s = i", unimodular_example_case}},
        {5, {"lambda-kernel curvature", curvature_grid}},
        {6, {"similarity identity", similarity_identity}},
        {7, {"reducing-projection concordance", reducing_concordance}},
        {8, {"metric determinant bound with K1 = K^(2)", metric_det_bound}},
        {9, {"Shields diagnostics", shields}},
        {10, {"J_k positivity", jk_positivity}},
        {11, {"unitary conjugation iff", unitary_iff}},
    };
    return table;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion")->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    for (const auto& [id, entry] : criteria()) {
        if (only != 0 && id != only) continue;
        Outcome o;
        try {
            o = entry.second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::cout << "criterion " << id << " (" << entry.first << "): " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
                  << "\n";
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
