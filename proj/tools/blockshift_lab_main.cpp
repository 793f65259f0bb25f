// blockshift-lab command-line front end.

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "blockshift_lab/blockshift_lab.hpp"

namespace bl = blockshift_lab;
namespace fs = std::filesystem;
using bl::io::json;

namespace {

constexpr int exit_usage = 2;

unsigned worker_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BLOCKSHIFT_LAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) n = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

void write_text(const std::string& path, const std::string& body) {
    if (path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(path);
    if (!out) throw bl::ConfigError("cannot write " + path);
    out << body;
}

/// An operator payload either bare or inside a case file; returns the case window if any.
std::pair<bl::BlockShiftSpec, std::optional<bl::Window>> load_operator(const std::string& path) {
    const json j = bl::io::load_json(path);
    if (j.contains("checks")) {
        const bl::CaseFile c = bl::parse_case(j);
        if (!c.op) throw bl::ConfigError(path + ": case has no operator payload");
        return {*c.op, c.window};
    }
    return {bl::io::operator_from_json(j), std::nullopt};
}

bl::KernelSpec load_kernel(const std::string& path) {
    const json j = bl::io::load_json(path);
    if (j.contains("checks")) {
        const bl::CaseFile c = bl::parse_case(j);
        if (!c.kernel) throw bl::ConfigError(path + ": case has no kernel payload");
        return *c.kernel;
    }
    return bl::io::kernel_from_json(j);
}

bl::Window pick_window(const std::string& flag, const std::optional<bl::Window>& fallback) {
    if (!flag.empty()) return bl::io::parse_window(flag);
    if (fallback) return *fallback;
    throw bl::ConfigError("no window: pass --window a:b");
}

std::vector<double> parse_radii(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            parts.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw bl::ConfigError("--radii: expected lo:hi:count, got \"" + text + "\"");
        }
    }
    if (parts.size() != 3 || parts[2] < 2) throw bl::ConfigError("--radii: expected lo:hi:count with count >= 2");
    const auto count = static_cast<int>(parts[2]);
    std::vector<double> r;
    for (int i = 0; i < count; ++i) r.push_back(parts[0] + (parts[1] - parts[0]) * i / (count - 1));
    return r;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// --- check ----------------------------------------------------------------------

int cmd_check(const std::vector<std::string>& files, const std::string& window, std::optional<double> tol,
              bool strict, const std::string& json_out) {
    bl::CaseOverrides ov;
    if (!window.empty()) ov.window = bl::io::parse_window(window);
    ov.tol = tol;
    ov.strict = strict;

    std::vector<bl::CaseReport> reports(files.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) reports[i] = bl::run_case_file(files[i], ov);
    };
    std::vector<std::thread> pool;
    const unsigned workers = worker_count(files.size());
    for (unsigned k = 1; k < workers; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    int code = 0;
    json all = json::array();
    for (const auto& r : reports) {
        std::cout << bl::summary_text(r);
        all.push_back(bl::report_json(r));
        if (r.exit_code == 2) code = 2;
        else if (r.exit_code == 1 && code == 0) code = 1;
    }
    if (!json_out.empty()) write_text(json_out, (all.size() == 1 ? all[0] : all).dump(2) + "\n");
    return code;
}

// --- similar --------------------------------------------------------------------

int cmd_similar(const std::string& a, const std::string& b, const std::string& window, std::optional<double> tol) {
    const auto [sa, wa] = load_operator(a);
    const auto [sb, wb] = load_operator(b);
    const bl::Window win = pick_window(window, wa ? wa : wb);
    const bl::Verdict v = bl::compare_similarity(sa, sb, win, tol.value_or(bl::default_tol));
    std::cout << "similar: " << bl::to_string(v.status);
    if (!v.holds() && !v.clause.empty()) std::cout << " (" << v.clause << ")";
    std::cout << "\n";
    for (const auto& n : v.notes) std::cout << "  " << n << "\n";
    if (v.status == bl::Status::inapplicable) return 2;
    return v.holds() ? 0 : 1;
}

// --- kernel profile -------------------------------------------------------------

int cmd_kernel_profile(const std::string& path, const std::string& radii, const std::string& over,
                       const std::string& csv) {
    const bl::KernelSpec k = load_kernel(path);
    const std::vector<double> r = parse_radii(radii);
    bl::EvalOptions eo;
    eo.radius_limit = std::max(eo.radius_limit, r.back());
    std::ostringstream out;
    out << std::setprecision(17);
    if (over.empty()) {
        out << "r,k_rr,tail_bound\n";
        for (double x : r) {
            const bl::KernelSpec kk = bl::adapt_truncation(k, x * x);
            const bl::KernelValue v = bl::eval_kernel(kk, x, x, eo);
            out << x << "," << v.value.real() << "," << v.tail_bound << "\n";
        }
    } else {
        const bl::KernelSpec den = load_kernel(over);
        const bl::RatioReport rep = bl::kernel_ratio_profile(k, den, r);
        out << "r,ratio\n";
        for (std::size_t i = 0; i < rep.radii.size(); ++i) out << rep.radii[i] << "," << rep.values[i] << "\n";
        std::cerr << "limit class " << bl::to_string(rep.limit_class) << ", exponent " << rep.exponent << "\n";
    }
    write_text(csv.empty() ? "-" : csv, out.str());
    return 0;
}

// --- oracle ---------------------------------------------------------------------

int cmd_oracle_gram(const std::string& path, bl::Index n) {
    const auto [s, w] = load_operator(path);
    const bl::GramCheck g = bl::dense_gram_check(s, n);
    const bl::GramPair dense = bl::local_gram(s, n);
    print_json({{"n", n},
                {"form", bl::to_string(g.form)},
                {"A", bl::io::matrix_to_json(dense.A)},
                {"B", bl::io::matrix_to_json(dense.B)},
                {"deviation_A", g.deviation_A},
                {"deviation_B", g.deviation_B}});
    return 0;
}

int cmd_oracle_commutator(const std::string& path, bl::Index n) {
    const auto [s, w] = load_operator(path);
    const bl::CommutatorEntries e = bl::commutator_entries(s, n);
    const bl::Mat2 d = bl::commutator_direct(s, n);
    print_json({{"n", n},
                {"e11", bl::io::to_json(e.e11)},
                {"e21", bl::io::to_json(e.e21)},
                {"direct", bl::io::matrix_to_json(d)},
                {"deviation", std::max(std::abs(e.e11 - d(0, 0)), std::abs(e.e21 - d(1, 0)))}});
    return 0;
}

int cmd_oracle_identity(const std::string& path, const std::string& window, bl::Index band) {
    const auto [s, w] = load_operator(path);
    const bl::IdentityCheck r = bl::similarity_identity_check(s, pick_window(window, w), band);
    print_json({{"interior_deviation", r.interior_deviation},
                {"full_deviation", r.full_deviation},
                {"interior_size", r.interior_size}});
    return 0;
}

bl::TruncationMode parse_mode(const std::string& m) {
    if (m == "hard") return bl::TruncationMode::hard;
    if (m == "circulant") return bl::TruncationMode::circulant;
    throw bl::ConfigError("--mode: hard or circulant");
}

int cmd_oracle_truncate(const std::string& path, const std::string& window, const std::string& mode,
                        std::optional<double> tol) {
    const auto [s, w] = load_operator(path);
    print_json(bl::io::to_json(bl::truncate(s, pick_window(window, w), parse_mode(mode), tol.value_or(bl::default_tol))));
    return 0;
}

int cmd_oracle_mobius(const std::string& matrix_path, double theta, double a_re, double a_im) {
    const bl::MatX m = bl::io::matrix_from_json(bl::io::load_json(matrix_path));
    const bl::MobiusMap phi(theta, bl::cplx(a_re, a_im));
    print_json({{"result", bl::io::matrix_to_json(bl::mobius_of_matrix(phi, m))}});
    return 0;
}

int cmd_oracle_reducing(const std::string& path, const std::string& window, const std::string& mode,
                        std::optional<double> tol, bl::Index band) {
    const json j = bl::io::load_json(path);
    bl::MatX m;
    bl::ReducingOptions opt;
    if (tol) opt.tol = *tol;
    if (j.is_array()) {
        m = bl::io::matrix_from_json(j);
        opt.boundary_band = static_cast<Eigen::Index>(std::max<bl::Index>(band, 0));
    } else {
        const auto [s, w] = load_operator(path);
        const bl::TruncationMode tm = parse_mode(mode);
        m = bl::truncate(s, pick_window(window, w), tm).m;
        const bl::Index b = band >= 0 ? band : (tm == bl::TruncationMode::hard ? 2 : 0);
        opt.boundary_band = static_cast<Eigen::Index>(2 * b);
    }
    const bl::ReducingReport r = bl::reducing_search(m, opt);
    json out{{"size", m.rows()},
             {"commutant_dim", r.commutant_dim},
             {"projection_found", r.projection.has_value()},
             {"boundary_mass", r.boundary_mass},
             {"boundary_artifact", r.boundary_artifact},
             {"notes", r.notes}};
    if (r.projection) out["projection_rank"] = static_cast<long>(std::lround(r.projection->trace().real()));
    print_json(out);
    return 0;
}

int cmd_oracle_unitary(const std::string& path, std::optional<double> tol) {
    const json j = bl::io::load_json(path);
    bl::io::require_fields(j, {"u", "v", "x"}, "unitary");
    const bl::ConjugationReport r = bl::unitary_conjugation_check(
        bl::io::matrix_from_json(bl::io::need(j, "u", "unitary"), "u"),
        bl::io::matrix_from_json(bl::io::need(j, "v", "unitary"), "v"),
        bl::io::matrix_from_json(bl::io::need(j, "x", "unitary"), "x"), tol.value_or(1e-10));
    print_json({{"conjugation_unitary", r.conjugation_unitary},
                {"unitarity_residual", r.unitarity_residual},
                {"intertwining_residual", r.intertwining_residual},
                {"intertwines", r.intertwines},
                {"iff_holds", r.iff_holds}});
    return r.iff_holds ? 0 : 1;
}

// --- list -----------------------------------------------------------------------

int cmd_list(const std::string& dir, const std::string& tag) {
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        const bl::CaseFile c = bl::parse_case(bl::io::load_json(p.string()));
        if (!tag.empty() && std::find(c.tags.begin(), c.tags.end(), tag) == c.tags.end()) continue;
        std::string tags;
        for (const auto& t : c.tags) tags += (tags.empty() ? "" : ",") + t;
        std::cout << std::left << std::setw(34) << p.filename().string() << std::setw(28) << tags << c.description
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block-shift and kernel diagnostics"};
    app.set_version_flag("--version", std::string(bl::tool_name) + " " + bl::tool_version);
    app.require_subcommand(1);

    std::vector<std::string> files;
    std::string window, json_out, over, csv, radii, mode = "hard", tag, cases_dir = BLOCKSHIFT_LAB_CASES_DIR;
    std::string a_path, b_path, path;
    std::optional<double> tol;
    bool strict = false;
    bl::Index n = 0, band = -1;
    double theta = 0.0, a_re = 0.0, a_im = 0.0;

    auto* check = app.add_subcommand("check", "Run case files");
    check->add_option("cases", files, "Case files")->required()->check(CLI::ExistingFile);
    check->add_option("--window", window, "Window override a:b");
    check->add_option("--tol", tol, "Tolerance override");
    check->add_option("--json", json_out, "Write the JSON report ('-' for stdout)");
    check->add_flag("--strict", strict, "Require obstruction clauses at every index");

    auto* similar = app.add_subcommand("similar", "Compare two operators by trace invariants");
    similar->add_option("a", a_path)->required()->check(CLI::ExistingFile);
    similar->add_option("b", b_path)->required()->check(CLI::ExistingFile);
    similar->add_option("--window", window);
    similar->add_option("--tol", tol);

    auto* kernel = app.add_subcommand("kernel", "Kernel tools");
    kernel->require_subcommand(1);
    auto* profile = kernel->add_subcommand("profile", "Diagonal profile or ratio against another kernel");
    profile->add_option("kernel", path)->required()->check(CLI::ExistingFile);
    profile->add_option("--radii", radii, "lo:hi:count")->required();
    profile->add_option("--over", over, "Denominator kernel")->check(CLI::ExistingFile);
    profile->add_option("--csv", csv, "Output CSV path");

    auto* oracle = app.add_subcommand("oracle", "Dense-linear-algebra oracles");
    oracle->require_subcommand(1);
    auto* o_gram = oracle->add_subcommand("gram", "Local Gram pair, closed form vs direct");
    auto* o_comm = oracle->add_subcommand("commutator", "Commutator entries vs direct product");
    auto* o_ident = oracle->add_subcommand("identity", "Truncated similarity identity");
    auto* o_trunc = oracle->add_subcommand("truncate", "Emit a truncated matrix");
    auto* o_mob = oracle->add_subcommand("mobius", "Mobius map of a matrix");
    auto* o_red = oracle->add_subcommand("reducing", "Search for a reducing projection");
    auto* o_unit = oracle->add_subcommand("unitary", "Unitary-conjugation triple {u, v, x}");
    for (auto* sc : {o_gram, o_comm, o_ident, o_trunc, o_red, o_unit})
        sc->add_option("input", path)->required()->check(CLI::ExistingFile);
    for (auto* sc : {o_gram, o_comm}) sc->add_option("--n", n, "Index");
    for (auto* sc : {o_ident, o_trunc, o_red}) sc->add_option("--window", window);
    for (auto* sc : {o_trunc, o_red}) sc->add_option("--mode", mode, "hard or circulant");
    for (auto* sc : {o_trunc, o_red, o_unit}) sc->add_option("--tol", tol);
    o_ident->add_option("--band", band, "Interior band");
    o_red->add_option("--band", band, "Boundary band in indices");
    o_mob->add_option("matrix", path)->required()->check(CLI::ExistingFile);
    o_mob->add_option("--theta", theta);
    o_mob->add_option("--a-re", a_re);
    o_mob->add_option("--a-im", a_im);

    auto* list = app.add_subcommand("list", "List shipped cases");
    list->add_option("--tag", tag);
    list->add_option("--cases-dir", cases_dir)->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (*check) return cmd_check(files, window, tol, strict, json_out);
        if (*similar) return cmd_similar(a_path, b_path, window, tol);
        if (*profile) return cmd_kernel_profile(path, radii, over, csv);
        if (*o_gram) return cmd_oracle_gram(path, n);
        if (*o_comm) return cmd_oracle_commutator(path, n);
        if (*o_ident) return cmd_oracle_identity(path, window, band < 0 ? 2 : band);
        if (*o_trunc) return cmd_oracle_truncate(path, window, mode, tol);
        if (*o_mob) return cmd_oracle_mobius(path, theta, a_re, a_im);
        if (*o_red) return cmd_oracle_reducing(path, window, mode, tol, band);
        if (*o_unit) return cmd_oracle_unitary(path, tol);
        if (*list) return cmd_list(cases_dir, tag);
    } catch (const bl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_usage;
}
