#include "blockshift_lab/case_runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <limits>

namespace blockshift_lab {

CaseFile parse_case(const io::json& j, std::string source_text) {
    io::require_fields(j, {"name", "description", "tags", "operator", "kernel", "window", "tolerances", "checks"}, "case");
    CaseFile c;
    c.source_text = std::move(source_text);
    c.name = io::need(j, "name", "case").get<std::string>();
    if (j.contains("description")) c.description = j.at("description").get<std::string>();
    if (j.contains("tags"))
        for (const auto& t : j.at("tags")) c.tags.push_back(t.get<std::string>());
    if (j.contains("operator")) c.op = io::operator_from_json(j.at("operator"));
    if (j.contains("kernel")) c.kernel = io::kernel_from_json(j.at("kernel"));
    if (j.contains("window")) c.window = io::window_from_json(j.at("window"));
    if (j.contains("tolerances")) {
        io::require_fields(j.at("tolerances"), {"tol"}, "case.tolerances");
        for (const auto& item : j.at("tolerances").items())
            c.tolerances[item.key()] = io::as_double(item.value(), "case.tolerances." + item.key());
    }
    const io::json& checks = io::need(j, "checks", "case");
    if (!checks.is_array() || checks.empty()) throw ConfigError("case.checks: expected a nonempty array");
    for (const auto& ch : checks) {
        io::require_fields(ch, {"check", "params"}, "case.checks[]");
        CheckSpec s;
        s.check = io::need(ch, "check", "case.checks[]").get<std::string>();
        if (ch.contains("params")) s.params = ch.at("params");
        if (!s.params.is_object()) throw ConfigError("case.checks[" + s.check + "].params: expected an object");
        c.checks.push_back(std::move(s));
    }
    return c;
}

namespace {

struct RunContext {
    const CaseFile& file;
    std::optional<Window> window;
    double tol;
    bool strict;

    const BlockShiftSpec& op(const std::string& check) const {
        if (!file.op) throw ConfigError(check + ": case has no operator payload");
        return *file.op;
    }
    const KernelSpec& kernel(const std::string& check) const {
        if (!file.kernel) throw ConfigError(check + ": case has no kernel payload");
        return *file.kernel;
    }
    const Window& win(const std::string& check) const {
        if (!window) throw ConfigError(check + ": case has no window");
        return *window;
    }
};

using P = const io::json&;

double num(P p, const char* key, double fallback) {
    return p.contains(key) ? io::as_double(p.at(key), key) : fallback;
}
Index integer(P p, const char* key, Index fallback) {
    return p.contains(key) ? io::as_index(p.at(key), key) : fallback;
}
bool flag(P p, const char* key, bool fallback) {
    if (!p.contains(key)) return fallback;
    if (!p.at(key).is_boolean()) throw ConfigError(std::string(key) + ": expected a boolean");
    return p.at(key).get<bool>();
}
std::string text(P p, const char* key, const std::string& fallback) {
    if (!p.contains(key)) return fallback;
    if (!p.at(key).is_string()) throw ConfigError(std::string(key) + ": expected a string");
    return p.at(key).get<std::string>();
}

/// "auto" | "identity" | {"reflection": i0} | {"table": [[n, m], ...]}
std::optional<PairingMap> pairing_from_json(P p) {
    if (!p.contains("pairing")) return std::nullopt;
    const io::json& g = p.at("pairing");
    if (g.is_string()) {
        if (g == "auto") return std::nullopt;
        if (g == "identity") return PairingMap::identity();
        throw ConfigError("pairing: unknown map \"" + g.get<std::string>() + "\"");
    }
    io::require_fields(g, {"reflection", "table"}, "pairing");
    if (g.contains("reflection")) return PairingMap::reflection(io::as_index(g.at("reflection"), "pairing.reflection"));
    std::map<Index, Index> t;
    for (const auto& pr : io::need(g, "table", "pairing")) t[io::as_index(pr.at(0), "pairing")] = io::as_index(pr.at(1), "pairing");
    return PairingMap::table(std::move(t));
}

std::vector<double> radii_from_json(P p, const char* key, std::vector<double> fallback) {
    if (!p.contains(key)) return fallback;
    const io::json& r = p.at(key);
    if (!r.is_array() || r.size() != 3) throw ConfigError(std::string(key) + ": expected [lo, hi, count]");
    const double lo = io::as_double(r[0], key), hi = io::as_double(r[1], key);
    const Index cnt = io::as_index(r[2], key);
    if (cnt < 2) throw ConfigError(std::string(key) + ": count must be >= 2");
    std::vector<double> out;
    for (Index i = 0; i < cnt; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cnt - 1));
    return out;
}

std::vector<cplx> points_from_json(P p, const char* key) {
    std::vector<cplx> out;
    for (const auto& z : io::need(p, key, key)) out.push_back(io::complex_from_json(z, key));
    return out;
}

Witness wit(std::optional<Index> n, std::string clause, double value, double threshold, bool ok,
                   std::string note = {}) {
    return Witness{n, std::move(clause), value, threshold, ok, std::move(note)};
}

PairingMap resolve_pairing(std::optional<PairingMap> g, const BlockShiftSpec& s, const Window& win, double tol) {
    if (g) return *g;
    const ReflectionSearch found = find_reflection(s, win, tol);
    if (!found.i0) throw InapplicableError("no reflection pairing n -> -(n+i0), |i0| <= 8, holds on window");
    return PairingMap::reflection(*found.i0);
}

// --- operator checks --------------------------------------------------------

CheckResult run_trace_pairing(const RunContext& cx, P p) {
    io::require_fields(p, {"pairing", "require_exclusive"}, "trace-pairing");
    const auto& s = cx.op("trace-pairing");
    const auto& win = cx.win("trace-pairing");
    const PairingMap g = resolve_pairing(pairing_from_json(p), s, win, cx.tol);
    const PairingReport r = trace_pairing(s, g, win, cx.tol);
    CheckResult out{"trace-pairing", {}, {}};
    Verdict& v = out.verdict;
    v.tolerances["tol"] = cx.tol;
    for (const auto& pr : r.pairs)
        v.witnesses.push_back(wit(pr.n, "pairing", pr.deviation, cx.tol, pr.satisfied, "image " + std::to_string(pr.image)));
    if (!r.holds) v.fail(r.first_failure, "pairing");
    for (const auto& c : r.collisions)
        v.notes.push_back("trace collision n=" + std::to_string(c.n) + " / n=" + std::to_string(c.m));
    if (flag(p, "require_exclusive", true) && r.exclusive && !*r.exclusive)
        v.fail(r.collisions.front().n, "exclusivity");
    out.details = {{"pairing", g.describe()}, {"skipped", r.skipped}, {"max_deviation", r.max_deviation},
                   {"collisions", r.collisions.size()}};
    if (r.exclusive) out.details["exclusive"] = *r.exclusive;
    return out;
}

CheckResult run_eigen_pairs(const RunContext& cx, P p) {
    io::require_fields(p, {"pairing"}, "eigen-pairs");
    const auto& s = cx.op("eigen-pairs");
    const auto& win = cx.win("eigen-pairs");
    const PairingMap g = resolve_pairing(pairing_from_json(p), s, win, cx.tol);
    CheckResult out{"eigen-pairs", {}, {}};
    Verdict& v = out.verdict;
    v.tolerances["tol"] = cx.tol;
    double worst = 0.0;
    io::json lambdas = io::json::array();
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        const auto m = g(n);
        if (!m || !win.contains(*m)) continue;
        const double ln = eigen_pair(s, n, cx.tol);
        const double lm = eigen_pair(s, *m, cx.tol);
        const bool ok = close(ln, lm, cx.tol);
        worst = std::max(worst, std::abs(ln - lm));
        lambdas.push_back(io::json::array({n, ln}));
        v.witnesses.push_back(wit(n, "lambda_n = lambda_g(n)", std::abs(ln - lm), cx.tol, ok, "image " + std::to_string(*m)));
        if (!ok) v.fail(n, "lambda_n = lambda_g(n)");
    }
    out.details = {{"pairing", g.describe()}, {"max_deviation", worst}, {"lambda", lambdas}};
    return out;
}

CheckResult run_alpha(const RunContext& cx, P p) {
    io::require_fields(p, {"t", "alpha", "i0", "strict"}, "alpha-criterion");
    const auto& win = cx.win("alpha-criterion");
    SequenceSpec t;
    cplx alpha;
    if (p.contains("t")) {
        t = io::sequence_from_json(p.at("t"), "alpha-criterion.t");
    } else {
        const auto& s = cx.op("alpha-criterion");
        if (!s.class_td()) throw ConfigError("alpha-criterion: operator is not of the form v = 1/w; give params.t");
        t = s.w;
    }
    if (p.contains("alpha")) {
        alpha = io::complex_from_json(p.at("alpha"), "alpha-criterion.alpha");
    } else {
        const auto c = cx.file.op ? constant_value(cx.file.op->d) : std::nullopt;
        if (!c) throw ConfigError("alpha-criterion: operator diagonal is not constant; give params.alpha");
        alpha = *c;
    }
    const Index i0 = integer(p, "i0", 1);
    const CheckOptions opt{cx.tol, flag(p, "strict", cx.strict)};
    return {"alpha-criterion", check_alpha_criterion(t, alpha, i0, win, opt), {{"i0", i0}, {"alpha", io::to_json(alpha)}}};
}

CheckResult run_complex(const RunContext& cx, P p) {
    io::require_fields(p, {"pairing", "strict"}, "complex-weights");
    const CheckOptions opt{cx.tol, flag(p, "strict", cx.strict)};
    Verdict v = check_complex_weights(cx.op("complex-weights"), pairing_from_json(p), cx.win("complex-weights"), opt);
    return {"complex-weights", std::move(v), {}};
}

CheckResult run_unimodular(const RunContext& cx, P p) {
    io::require_fields(p, {"pairing", "strict"}, "unimodular");
    const CheckOptions opt{cx.tol, flag(p, "strict", cx.strict)};
    Verdict v = check_unimodular(cx.op("unimodular"), pairing_from_json(p), cx.win("unimodular"), opt);
    return {"unimodular", std::move(v), {}};
}

CheckResult run_decay(const RunContext& cx, P p) {
    io::require_fields(p, {"k_max", "grid_step", "slope_threshold"}, "decay");
    DecayOptionsGrid g;
    g.k_max = integer(p, "k_max", g.k_max);
    g.grid_step = integer(p, "grid_step", 0);
    g.decay.slope_threshold = num(p, "slope_threshold", g.decay.slope_threshold);
    const CheckOptions opt{cx.tol, cx.strict};
    return {"decay", check_decay_criterion(cx.op("decay"), cx.win("decay"), g, opt), {}};
}

CheckResult run_commutator(const RunContext& cx, P p) {
    io::require_fields(p, {"max_deviation"}, "commutator-agreement");
    const auto& s = cx.op("commutator-agreement");
    const auto& win = cx.win("commutator-agreement");
    const double bound = num(p, "max_deviation", 1e-12);
    CheckResult out{"commutator-agreement", {}, {}};
    Verdict& v = out.verdict;
    v.tolerances["max_deviation"] = bound;
    double worst = 0.0, worst_anti = 0.0;
    io::json e11 = io::json::array();
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        const CommutatorEntries e = commutator_entries(s, n);
        const Mat2 d = commutator_direct(s, n);
        const double dev = std::max(std::abs(e.e11 - d(0, 0)) / magnitude_scale(std::abs(d(0, 0))),
                                    std::abs(e.e21 - d(1, 0)) / magnitude_scale(std::abs(d(1, 0))));
        const double anti = (d + d.adjoint()).cwiseAbs().maxCoeff() / magnitude_scale(d.cwiseAbs().maxCoeff());
        worst = std::max(worst, dev);
        worst_anti = std::max(worst_anti, anti);
        e11.push_back(io::json::array({n, e.e11.imag()}));
        if (dev > bound) {
            v.witnesses.push_back(wit(n, "closed form = direct", dev, bound, false));
            v.fail(n, "closed form = direct");
        }
        if (anti > bound) {
            v.witnesses.push_back(wit(n, "anti-Hermitian", anti, bound, false));
            v.fail(n, "anti-Hermitian");
        }
    }
    v.witnesses.push_back(wit(std::nullopt, "closed form = direct", worst, bound, worst <= bound, "max over window"));
    out.details = {{"max_deviation", worst}, {"max_anti_hermitian", worst_anti}, {"e11_imag", e11}};
    return out;
}

CheckResult run_dense_gram(const RunContext& cx, P p) {
    io::require_fields(p, {"max_deviation"}, "dense-gram");
    const auto& s = cx.op("dense-gram");
    const auto& win = cx.win("dense-gram");
    const double bound = num(p, "max_deviation", 1e-12);
    CheckResult out{"dense-gram", {}, {}};
    Verdict& v = out.verdict;
    v.tolerances["max_deviation"] = bound;
    double worst = 0.0;
    std::string form;
    for (Index n = win.n_min(); n <= win.n_max(); ++n) {
        const GramCheck g = dense_gram_check(s, n);
        form = to_string(g.form);
        worst = std::max(worst, g.max_deviation());
        if (g.max_deviation() > bound) {
            v.witnesses.push_back(wit(n, "closed-form Gram", g.max_deviation(), bound, false));
            v.fail(n, "closed-form Gram");
        }
    }
    v.witnesses.push_back(wit(std::nullopt, "closed-form Gram", worst, bound, worst <= bound, "max over window"));
    out.details = {{"form", form}, {"max_deviation", worst}};
    return out;
}

CheckResult run_identity(const RunContext& cx, P p) {
    io::require_fields(p, {"max_deviation", "band"}, "similarity-identity");
    const double bound = num(p, "max_deviation", 1e-13);
    const IdentityCheck r = similarity_identity_check(cx.op("similarity-identity"), cx.win("similarity-identity"),
                                                      integer(p, "band", 2));
    CheckResult out{"similarity-identity", {}, {}};
    out.verdict.tolerances["max_deviation"] = bound;
    const bool ok = r.interior_deviation <= bound;
    out.verdict.witnesses.push_back(wit(std::nullopt, "interior deviation", r.interior_deviation, bound, ok));
    if (!ok) out.verdict.fail(std::nullopt, "interior deviation");
    out.details = {{"interior_deviation", r.interior_deviation}, {"full_deviation", r.full_deviation},
                   {"interior_size", r.interior_size}};
    return out;
}

CheckResult run_reducing(const RunContext& cx, P p) {
    io::require_fields(p, {"mode", "expect_projection", "tol", "band", "component"}, "reducing-search");
    const auto& s = cx.op("reducing-search");
    const auto& win = cx.win("reducing-search");
    const std::string mode_text = text(p, "mode", "hard");
    if (mode_text != "hard" && mode_text != "circulant") throw ConfigError("reducing-search.mode: hard or circulant");
    const TruncationMode mode = mode_text == "hard" ? TruncationMode::hard : TruncationMode::circulant;
    // "block" (default) or "w" for the scalar shift with weights w
    const std::string component = text(p, "component", "block");
    ReducingOptions opt;
    opt.tol = num(p, "tol", 1e-10);
    const Index band = integer(p, "band", mode == TruncationMode::hard ? 2 : 0);
    MatX m;
    if (component == "block") {
        m = truncate(s, win, mode, cx.tol).m;
        opt.boundary_band = static_cast<Eigen::Index>(2 * band);
    } else if (component == "w") {
        m = truncate_shift(s.w, win, mode, cx.tol);
        opt.boundary_band = static_cast<Eigen::Index>(band);
    } else {
        throw ConfigError("reducing-search.component: block or w");
    }
    const ReducingReport r = reducing_search(m, opt);
    const bool expect = flag(p, "expect_projection", false);
    const bool found = r.projection.has_value();
    CheckResult out{"reducing-search", {}, {}};
    Verdict& v = out.verdict;
    v.tolerances["tol"] = opt.tol;
    v.witnesses.push_back(wit(std::nullopt, "projection found", found ? 1.0 : 0.0, expect ? 1.0 : 0.0, found == expect));
    if (found != expect) v.fail(std::nullopt, "projection found");
    v.notes = r.notes;
    out.details = {{"commutant_dim", r.commutant_dim}, {"projection_found", found},
                   {"idempotent_residual", r.idempotent_residual}, {"selfadjoint_residual", r.selfadjoint_residual},
                   {"commute_residual", r.commute_residual}, {"boundary_mass", r.boundary_mass},
                   {"boundary_artifact", r.boundary_artifact}, {"size", m.rows()}};
    return out;
}

ShieldsVerdict shields_verdict_from(const std::string& s) {
    if (s == "bounded-on-window") return ShieldsVerdict::bounded_on_window;
    if (s == "diverging") return ShieldsVerdict::diverging;
    if (s == "inconclusive") return ShieldsVerdict::inconclusive;
    throw ConfigError("shields.expect: bounded-on-window, diverging or inconclusive");
}

CheckResult run_shields(const RunContext& cx, P p) {
    io::require_fields(p, {"w", "v", "k_min", "k_max", "expect", "spread_bound", "expect_k"}, "shields");
    const auto& win = cx.win("shields");
    const SequenceSpec w = p.contains("w") ? io::sequence_from_json(p.at("w"), "shields.w") : cx.op("shields").w;
    const SequenceSpec v = p.contains("v") ? io::sequence_from_json(p.at("v"), "shields.v") : cx.op("shields").v;
    ShieldsOptions opt;
    opt.spread_bound = num(p, "spread_bound", opt.spread_bound);
    const ShieldsReport r = shields_diagnostic(w, v, integer(p, "k_min", -4), integer(p, "k_max", 4), win, opt);
    const ShieldsVerdict expect = shields_verdict_from(text(p, "expect", "bounded-on-window"));
    CheckResult out{"shields", {}, {}};
    Verdict& vd = out.verdict;
    vd.tolerances["spread_bound"] = opt.spread_bound;
    const bool ok = r.verdict == expect;
    vd.witnesses.push_back(wit(std::nullopt, "classification", r.spread, opt.spread_bound, ok, to_string(r.verdict)));
    if (!ok) vd.fail(std::nullopt, "classification (" + to_string(r.verdict) + ")");
    if (p.contains("expect_k")) {
        const Index ek = io::as_index(p.at("expect_k"), "shields.expect_k");
        const bool kok = r.k == ek;
        vd.witnesses.push_back(wit(std::nullopt, "offset", static_cast<double>(r.k), static_cast<double>(ek), kok));
        if (!kok) vd.fail(std::nullopt, "offset");
    }
    out.details = {{"k", r.k}, {"inf_ratio", r.inf_ratio}, {"sup_ratio", r.sup_ratio}, {"spread", r.spread},
                   {"trend", to_string(r.trend)}, {"verdict", to_string(r.verdict)},
                   {"nested_log_spreads", r.nested_log_spreads}};
    return out;
}

// --- kernel checks ----------------------------------------------------------

/// Curvature parameter c with curvature -c/(1-|w|^2)^2, defined for lambda kernels and their products.
std::optional<double> lambda_weight(const KernelSpec& k) {
    if (k.kind() == KernelSpec::Kind::lambda) return k.parameter();
    if (k.kind() == KernelSpec::Kind::product) {
        const auto a = lambda_weight(k.left());
        const auto b = lambda_weight(k.right());
        if (a && b) return *a + *b;
    }
    return std::nullopt;
}

CheckResult run_curvature(const RunContext& cx, P p) {
    io::require_fields(p, {"lambdas", "max_radius", "step", "h", "max_error"}, "curvature-grid");
    std::vector<KernelSpec> kernels;
    if (p.contains("lambdas")) {
        for (const auto& l : p.at("lambdas")) kernels.push_back(KernelSpec::lambda(io::as_double(l, "lambdas")));
    } else {
        kernels.push_back(cx.kernel("curvature-grid"));
    }
    const double rmax = num(p, "max_radius", 0.8);
    const double step = num(p, "step", 0.05);
    const double bound = num(p, "max_error", 1e-6);
    const CurvatureOptions co{num(p, "h", 1e-3)};
    CheckResult out{"curvature-grid", {}, {}};
    Verdict& v = out.verdict;
    v.tolerances["max_error"] = bound;
    v.tolerances["h"] = co.h;
    double worst = 0.0;
    std::size_t points = 0;
    const auto steps = static_cast<int>(std::floor(rmax / step + 1e-9));
    for (const KernelSpec& k : kernels) {
        const auto c = lambda_weight(k);
        if (!c) {
            out.verdict = Verdict::inapplicable("curvature-grid: no closed-form curvature for " + k.describe());
            return out;
        }
        for (int ix = -steps; ix <= steps; ++ix)
            for (int iy = -steps; iy <= steps; ++iy) {
                const cplx w(ix * step, iy * step);
                if (std::abs(w) > rmax + 1e-12) continue;
                const double exact = -*c / std::pow(1.0 - std::norm(w), 2.0);
                const double err = std::abs(curvature(k, w, co) - exact);
                ++points;
                if (err > worst) worst = err;
                if (err > bound) {
                    v.witnesses.push_back(wit(std::nullopt, "curvature error", err, bound, false,
                                              k.describe() + " at w=" + std::to_string(w.real()) + "+" +
                                                  std::to_string(w.imag()) + "i"));
                    v.fail(std::nullopt, "curvature error");
                }
            }
    }
    v.witnesses.push_back(wit(std::nullopt, "curvature error", worst, bound, worst <= bound, "max over grid"));
    out.details = {{"max_error", worst}, {"points", points}, {"kernels", kernels.size()}};
    return out;
}

LimitClass limit_class_from(const std::string& s) {
    if (s == "zero") return LimitClass::zero;
    if (s == "infinity") return LimitClass::infinity;
    if (s == "bounded") return LimitClass::bounded;
    throw ConfigError("expected limit class zero, infinity or bounded");
}

CheckResult run_kernel_ratio(const RunContext& cx, P p) {
    io::require_fields(p, {"numerator", "denominator", "radii", "expect"}, "kernel-ratio");
    const KernelSpec numk =
        p.contains("numerator") ? io::kernel_from_json(p.at("numerator"), "kernel-ratio.numerator") : cx.kernel("kernel-ratio");
    const KernelSpec den = io::kernel_from_json(io::need(p, "denominator", "kernel-ratio"), "kernel-ratio.denominator");
    const std::vector<double> radii = radii_from_json(p, "radii", radii_from_json(io::json{{"r", {0.1, 0.99, 60}}}, "r", {}));
    const RatioReport r = kernel_ratio_profile(numk, den, radii);
    const LimitClass expect = limit_class_from(text(p, "expect", "bounded"));
    CheckResult out{"kernel-ratio", {}, {}};
    const bool ok = r.limit_class == expect;
    out.verdict.witnesses.push_back(wit(std::nullopt, "limit class", r.exponent, 0.1, ok, to_string(r.limit_class)));
    if (!ok) out.verdict.fail(std::nullopt, "limit class (" + to_string(r.limit_class) + ")");
    out.details = {{"limit_class", to_string(r.limit_class)}, {"exponent", r.exponent},
                   {"bounded_above", r.bounded_above}, {"bounded_from_zero", r.bounded_from_zero},
                   {"first_value", r.values.front()}, {"last_value", r.values.back()}};
    return out;
}

CheckResult run_boundary(const RunContext& cx, P p) {
    io::require_fields(p, {"lambdas", "radii", "expect_holds"}, "boundary-limits");
    std::vector<double> lambdas{0.5, 1.0, 2.0, 3.0};
    if (p.contains("lambdas")) {
        lambdas.clear();
        for (const auto& l : p.at("lambdas")) lambdas.push_back(io::as_double(l, "lambdas"));
    }
    const std::vector<double> radii = radii_from_json(p, "radii", radii_from_json(io::json{{"r", {0.1, 0.99, 60}}}, "r", {}));
    const BoundaryLimitReport r = boundary_limit_scan(cx.kernel("boundary-limits"), lambdas, radii);
    const bool expect = flag(p, "expect_holds", true);
    CheckResult out{"boundary-limits", {}, {}};
    io::json rows = io::json::array();
    for (const auto& e : r.entries) {
        rows.push_back({{"lambda", e.lambda}, {"product", to_string(e.product_class)}, {"quotient", to_string(e.quotient_class)}});
        out.verdict.witnesses.push_back(wit(std::nullopt, "limits are 0 or infinity", e.lambda, 0.0, e.satisfied,
                                            "product " + to_string(e.product_class) + ", quotient " +
                                                to_string(e.quotient_class)));
    }
    if (r.holds != expect) out.verdict.fail(std::nullopt, expect ? "limits are 0 or infinity" : "expected a bounded limit");
    out.details = {{"entries", rows}, {"holds", r.holds}};
    return out;
}

CheckResult run_metric_det(const RunContext& cx, P p) {
    io::require_fields(p, {"mu", "k1", "x", "radii", "bound"}, "metric-det");
    const double mu = num(p, "mu", 1.0);
    const KernelSpec k1 = p.contains("k1") ? io::kernel_from_json(p.at("k1"), "metric-det.k1") : cx.kernel("metric-det");
    const SequenceSpec x = p.contains("x") ? io::sequence_from_json(p.at("x"), "metric-det.x") : seq::constant(1.0);
    const std::vector<double> radii = radii_from_json(p, "radii", radii_from_json(io::json{{"r", {0.0, 0.9, 50}}}, "r", {}));
    const std::string bound = text(p, "bound", "operator-norm");
    if (bound != "operator-norm" && bound != "sup-x") throw ConfigError("metric-det.bound: operator-norm or sup-x");
    CheckResult out{"metric-det", {}, {}};
    Verdict& v = out.verdict;
    const double slack = 1e-9;
    v.tolerances["slack"] = slack;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    EvalOptions eo;
    eo.radius_limit = std::max(eo.radius_limit, radii.back());
    for (double r : radii) {
        const MetricDetReport m = metric_det_ratio(mu, k1, x, cplx(r, 0.0), eo);
        const double b = 1.0 + (bound == "sup-x" ? m.sup_x_sq : m.operator_norm_sq);
        lo = std::min(lo, m.ratio);
        hi = std::max(hi, m.ratio);
        const bool ok = m.ratio >= 1.0 - slack && m.ratio <= b + slack;
        if (!ok) {
            v.witnesses.push_back(wit(std::nullopt, "1 <= ratio <= 1 + ||X||^2", m.ratio, b, false,
                                      "|w|=" + std::to_string(r)));
            v.fail(std::nullopt, "1 <= ratio <= 1 + ||X||^2");
        }
    }
    out.details = {{"min_ratio", lo}, {"max_ratio", hi}, {"bound", bound}};
    return out;
}

CheckResult run_jk(const RunContext& cx, P p) {
    io::require_fields(p, {"k0", "k1", "order", "points", "psd_tol"}, "jk-positivity");
    const KernelSpec k0 = p.contains("k0") ? io::kernel_from_json(p.at("k0"), "jk.k0") : cx.kernel("jk-positivity");
    const KernelSpec k1 = p.contains("k1") ? io::kernel_from_json(p.at("k1"), "jk.k1") : cx.kernel("jk-positivity");
    const auto order = static_cast<std::size_t>(integer(p, "order", 1));
    const double psd_tol = num(p, "psd_tol", 1e-9);
    const GramReport g = sampled_gram(jk_kernel(k0, k1, order), points_from_json(p, "points"), psd_tol);
    CheckResult out{"jk-positivity", {}, {}};
    Verdict& v = out.verdict;
    v.tolerances["psd_tol"] = psd_tol;
    v.witnesses.push_back(wit(std::nullopt, "Hermitian", g.hermitian_residual, 1e-12, g.hermitian_residual <= 1e-12));
    v.witnesses.push_back(wit(std::nullopt, "min eigenvalue", g.min_eigenvalue, -psd_tol, g.nonnegative));
    if (g.hermitian_residual > 1e-12) v.fail(std::nullopt, "Hermitian");
    if (!g.nonnegative) v.fail(std::nullopt, "min eigenvalue");
    out.details = {{"min_eigenvalue", g.min_eigenvalue}, {"hermitian_residual", g.hermitian_residual},
                   {"size", g.gram.rows()}};
    return out;
}

Multiplier multiplier_from_json(const io::json& j) {
    if (j.is_string()) {
        if (j == "coordinate") return CoordinateMultiplier{};
        throw ConfigError("multiplier: unknown \"" + j.get<std::string>() + "\"");
    }
    io::require_fields(j, {"mobius", "constant"}, "multiplier");
    if (j.contains("constant")) return ConstantMultiplier{io::complex_from_json(j.at("constant"), "multiplier.constant")};
    const io::json& m = io::need(j, "mobius", "multiplier");
    io::require_fields(m, {"theta", "a"}, "multiplier.mobius");
    return MobiusMap(num(m, "theta", 0.0), m.contains("a") ? io::complex_from_json(m.at("a"), "multiplier.mobius.a") : cplx(0.0));
}

CheckResult run_multiplier(const RunContext& cx, P p) {
    io::require_fields(p, {"k0", "multiplier", "c", "points", "expect_nonnegative"}, "multiplier-witness");
    const KernelSpec k0 = p.contains("k0") ? io::kernel_from_json(p.at("k0"), "multiplier.k0") : cx.kernel("multiplier-witness");
    const Multiplier phi = multiplier_from_json(io::need(p, "multiplier", "multiplier-witness"));
    const double c = num(p, "c", 1.0);
    const GramReport g = multiplier_bound_witness(k0, phi, c, points_from_json(p, "points"));
    const bool expect = flag(p, "expect_nonnegative", true);
    CheckResult out{"multiplier-witness", {}, {}};
    out.verdict.witnesses.push_back(wit(std::nullopt, "min eigenvalue", g.min_eigenvalue, -1e-9, g.nonnegative == expect));
    if (g.nonnegative != expect) out.verdict.fail(std::nullopt, expect ? "negative eigenvalue" : "expected a negative eigenvalue");
    out.details = {{"min_eigenvalue", g.min_eigenvalue}, {"nonnegative", g.nonnegative}};
    return out;
}

using CheckFn = std::function<CheckResult(const RunContext&, P)>;

const std::map<std::string, CheckFn>& check_table() {
    static const std::map<std::string, CheckFn> table{
        {"trace-pairing", run_trace_pairing},     {"eigen-pairs", run_eigen_pairs},
        {"alpha-criterion", run_alpha},           {"complex-weights", run_complex},
        {"unimodular", run_unimodular},           {"decay", run_decay},
        {"commutator-agreement", run_commutator}, {"dense-gram", run_dense_gram},
        {"similarity-identity", run_identity},    {"reducing-search", run_reducing},
        {"shields", run_shields},                 {"curvature-grid", run_curvature},
        {"kernel-ratio", run_kernel_ratio},       {"boundary-limits", run_boundary},
        {"metric-det", run_metric_det},           {"jk-positivity", run_jk},
        {"multiplier-witness", run_multiplier},
    };
    return table;
}

int exit_code_for(const std::vector<CheckResult>& results) {
    int code = 0;
    for (const auto& r : results) {
        if (r.verdict.status == Status::inapplicable) return 2;
        if (r.verdict.status == Status::fails_at) code = 1;
    }
    return code;
}

}  // namespace

std::vector<std::string> known_checks() {
    std::vector<std::string> out;
    for (const auto& [name, fn] : check_table()) out.push_back(name);
    return out;
}

CaseReport run_case(const CaseFile& file, const CaseOverrides& ov) {
    CaseReport rep;
    rep.name = file.name;
    rep.input_hash = io::fnv1a64(file.source_text);
    rep.window = ov.window ? ov.window : file.window;
    rep.tolerances = file.tolerances;
    const double tol = ov.tol.value_or(file.tolerances.count("tol") ? file.tolerances.at("tol") : default_tol);
    rep.tolerances["tol"] = tol;
    const RunContext cx{file, rep.window, tol, ov.strict};
    for (const CheckSpec& spec : file.checks) {
        const auto it = check_table().find(spec.check);
        if (it == check_table().end()) {
            rep.error = "unknown check \"" + spec.check + "\"";
            rep.exit_code = 2;
            return rep;
        }
        try {
            rep.results.push_back(it->second(cx, spec.params));
        } catch (const InapplicableError& e) {
            rep.results.push_back({spec.check, Verdict::inapplicable(e.what()), {}});
        } catch (const DomainError& e) {
            rep.results.push_back({spec.check, Verdict::inapplicable(std::string("domain: ") + e.what()), {}});
        } catch (const nlohmann::json::exception& e) {
            rep.error = spec.check + ": " + e.what();
            rep.exit_code = 2;
            return rep;
        } catch (const Error& e) {
            rep.error = spec.check + ": " + e.what();
            rep.exit_code = 2;
            return rep;
        }
    }
    rep.exit_code = exit_code_for(rep.results);
    return rep;
}

CaseReport run_case_file(const std::string& path, const CaseOverrides& ov) {
    try {
        const std::string text = io::read_file(path);
        const CaseFile file = parse_case(io::parse_json(text, path), text);
        return run_case(file, ov);
    } catch (const nlohmann::json::exception& e) {
        CaseReport rep;
        rep.name = path;
        rep.error = path + ": " + e.what();
        rep.exit_code = 2;
        return rep;
    } catch (const Error& e) {
        CaseReport rep;
        rep.name = path;
        rep.error = e.what();
        rep.exit_code = 2;
        return rep;
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

io::json report_json(const CaseReport& rep, bool with_timestamp) {
    io::json checks = io::json::array();
    for (const auto& r : rep.results)
        checks.push_back({{"check", r.check}, {"verdict", io::to_json(r.verdict)}, {"details", r.details}});
    io::json j{{"tool", tool_name},
               {"version", tool_version},
               {"case", rep.name},
               {"input_hash", "fnv1a64:" + rep.input_hash},
               {"tolerances", rep.tolerances},
               {"checks", checks},
               {"exit_code", rep.exit_code}};
    j["window"] = rep.window ? io::to_json(*rep.window) : io::json(nullptr);
    if (!rep.error.empty()) j["error"] = rep.error;
    if (with_timestamp) j["generated_at"] = utc_timestamp();
    return j;
}

std::string summary_text(const CaseReport& rep) {
    std::string out = "case " + rep.name;
    if (rep.window) out += "  window [" + std::to_string(rep.window->n_min()) + "," + std::to_string(rep.window->n_max()) + "]";
    out += "\n";
    for (const auto& r : rep.results) {
        out += "  " + r.check + ": " + to_string(r.verdict.status);
        if (r.verdict.status != Status::holds_on_window) {
            out += " (" + r.verdict.clause;
            if (r.verdict.fail_index) out += " at n=" + std::to_string(*r.verdict.fail_index);
            out += ")";
        }
        std::size_t flagged = 0;
        for (const auto& n : r.verdict.notes)
            if (n.rfind("flagged:", 0) == 0) ++flagged;
        if (flagged > 0) out += "  [" + std::to_string(flagged) + " flagged]";
        out += "\n";
        for (const auto& n : r.verdict.notes)
            if (n.rfind("flagged:", 0) == 0) out += "      " + n + "\n";
    }
    if (!rep.error.empty()) out += "  error: " + rep.error + "\n";
    out += "  exit " + std::to_string(rep.exit_code) + "\n";
    return out;
}

}  // namespace blockshift_lab
