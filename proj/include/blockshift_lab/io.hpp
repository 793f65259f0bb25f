#ifndef BLOCKSHIFT_LAB_IO_HPP
#define BLOCKSHIFT_LAB_IO_HPP

// JSON (de)serialization. Complex numbers are {"re": x, "im": y}; a bare number
// is accepted on input as a real value. Matrices are arrays of rows. Objects
// with fields outside the documented set are rejected.

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include "blockshift_lab/blockshift.hpp"
#include "blockshift_lab/kernels.hpp"
#include "blockshift_lab/seqcore.hpp"
#include "blockshift_lab/types.hpp"

namespace blockshift_lab::io {

using json = nlohmann::json;

inline void require_fields(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> ok;
    for (const char* a : allowed) ok.insert(a);
    for (const auto& item : j.items())
        if (!ok.count(item.key())) throw ConfigError(where + ": unknown field \"" + item.key() + "\"");
}

inline const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
    return j.at(key);
}

inline double as_double(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

inline Index as_index(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return j.get<Index>();
}

// ---------------------------------------------------------------------------
// Complex, windows, matrices
// ---------------------------------------------------------------------------

inline json to_json(cplx c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

inline cplx complex_from_json(const json& j, const std::string& where = "complex") {
    if (j.is_number()) return {j.get<double>(), 0.0};
    require_fields(j, {"re", "im"}, where);
    return {j.contains("re") ? as_double(j.at("re"), where + ".re") : 0.0,
            j.contains("im") ? as_double(j.at("im"), where + ".im") : 0.0};
}

inline json to_json(const Window& w) { return json::array({w.n_min(), w.n_max()}); }

inline Window window_from_json(const json& j, const std::string& where = "window") {
    if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": expected [n_min, n_max]");
    return Window(as_index(j[0], where), as_index(j[1], where));
}

/// "a:b" -> Window
inline Window parse_window(const std::string& text) {
    const auto colon = text.find(':', text.empty() ? 0 : 1);
    if (colon == std::string::npos) throw ConfigError("window: expected a:b, got \"" + text + "\"");
    try {
        std::size_t used = 0;
        const Index a = std::stoll(text.substr(0, colon), &used);
        if (used != colon) throw ConfigError("window: bad lower bound");
        const std::string rest = text.substr(colon + 1);
        const Index b = std::stoll(rest, &used);
        if (used != rest.size()) throw ConfigError("window: bad upper bound");
        return Window(a, b);
    } catch (const std::logic_error&) {
        throw ConfigError("window: expected a:b, got \"" + text + "\"");
    }
}

inline json matrix_to_json(const MatX& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline MatX matrix_from_json(const json& j, const std::string& where = "matrix") {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw ConfigError(where + ": rows must be nonempty arrays");
    MatX m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ConfigError(where + ": ragged rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_from_json(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

// ---------------------------------------------------------------------------
// Sequences
// ---------------------------------------------------------------------------

namespace detail {

struct SequenceWriter {
    json operator()(const seqkind::Constant& k) const { return {{"kind", "constant"}, {"value", to_json(k.value)}}; }
    json operator()(const seqkind::Table& k) const {
        json entries = json::array();
        for (const auto& [n, c] : k.entries) entries.push_back(json::array({n, to_json(c)}));
        json j{{"kind", "table"}, {"entries", entries}};
        if (k.fallback) j["default"] = to_json(*k.fallback);
        return j;
    }
    json operator()(const seqkind::MobiusRational& k) const {
        return {{"kind", "mobius-rational"}, {"c1", k.c1}, {"c2", k.c2}, {"s", to_json(k.s)}};
    }
    json operator()(const seqkind::SqrtRatio& k) const { return {{"kind", "sqrt-ratio"}, {"a", k.a}, {"b", k.b}}; }
    json operator()(const seqkind::Periodic& k) const {
        json cycle = json::array();
        for (cplx c : k.cycle) cycle.push_back(to_json(c));
        return {{"kind", "periodic"}, {"cycle", cycle}};
    }
    json operator()(const seqkind::ReciprocalOf& k) const;
    json operator()(const seqkind::NegatedShiftedReflection& k) const;
    json operator()(const seqkind::PointwiseProduct& k) const;
    json operator()(const seqkind::Polynomial& k) const {
        json cs = json::array();
        for (cplx c : k.coefficients) cs.push_back(to_json(c));
        return {{"kind", "polynomial"}, {"coefficients", cs}};
    }
    json operator()(const seqkind::SqrtAbsQuotient& k) const;
};

}  // namespace detail

inline json to_json(const SequenceSpec& s) { return std::visit(detail::SequenceWriter{}, s.node().kind); }

namespace detail {

inline json SequenceWriter::operator()(const seqkind::ReciprocalOf& k) const {
    return {{"kind", "reciprocal-of"}, {"inner", to_json(k.inner)}};
}
inline json SequenceWriter::operator()(const seqkind::NegatedShiftedReflection& k) const {
    return {{"kind", "negated-shifted-reflection"}, {"inner", to_json(k.inner)}, {"shift", k.shift}};
}
inline json SequenceWriter::operator()(const seqkind::PointwiseProduct& k) const {
    return {{"kind", "pointwise-product"}, {"left", to_json(k.left)}, {"right", to_json(k.right)}};
}
inline json SequenceWriter::operator()(const seqkind::SqrtAbsQuotient& k) const {
    return {{"kind", "sqrt-abs-quotient"}, {"numerator", to_json(k.numerator)}, {"denominator", to_json(k.denominator)}};
}

}  // namespace detail

inline SequenceSpec sequence_from_json(const json& j, const std::string& where = "sequence") {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::string kind = need(j, "kind", where).get<std::string>();
    const std::string at = where + "(" + kind + ")";
    if (kind == "constant") {
        require_fields(j, {"kind", "value"}, at);
        return seq::constant(complex_from_json(need(j, "value", at), at + ".value"));
    }
    if (kind == "table") {
        require_fields(j, {"kind", "entries", "default"}, at);
        std::map<Index, cplx> entries;
        const json& e = need(j, "entries", at);
        if (e.is_object()) {
            for (const auto& item : e.items()) {
                try {
                    entries[std::stoll(item.key())] = complex_from_json(item.value(), at + ".entries");
                } catch (const std::logic_error&) {
                    throw ConfigError(at + ": table keys must be integers");
                }
            }
        } else if (e.is_array()) {
            for (const auto& pair : e) {
                if (!pair.is_array() || pair.size() != 2) throw ConfigError(at + ": entries must be [n, value] pairs");
                entries[as_index(pair[0], at)] = complex_from_json(pair[1], at + ".entries");
            }
        } else {
            throw ConfigError(at + ": entries must be an object or an array of pairs");
        }
        std::optional<cplx> fallback;
        if (j.contains("default")) fallback = complex_from_json(j.at("default"), at + ".default");
        return seq::table(std::move(entries), fallback);
    }
    if (kind == "mobius-rational") {
        require_fields(j, {"kind", "c1", "c2", "s"}, at);
        return seq::mobius_rational(as_double(need(j, "c1", at), at), as_double(need(j, "c2", at), at),
                                    complex_from_json(need(j, "s", at), at + ".s"));
    }
    if (kind == "sqrt-ratio") {
        require_fields(j, {"kind", "a", "b"}, at);
        return seq::sqrt_ratio(as_double(need(j, "a", at), at), as_double(need(j, "b", at), at));
    }
    if (kind == "periodic") {
        require_fields(j, {"kind", "cycle"}, at);
        std::vector<cplx> cycle;
        for (const auto& c : need(j, "cycle", at)) cycle.push_back(complex_from_json(c, at + ".cycle"));
        return seq::periodic(std::move(cycle));
    }
    if (kind == "reciprocal-of") {
        require_fields(j, {"kind", "inner"}, at);
        return seq::reciprocal_of(sequence_from_json(need(j, "inner", at), at + ".inner"));
    }
    if (kind == "negated-shifted-reflection") {
        require_fields(j, {"kind", "inner", "shift"}, at);
        return seq::negated_shifted_reflection(sequence_from_json(need(j, "inner", at), at + ".inner"),
                                               as_index(need(j, "shift", at), at + ".shift"));
    }
    if (kind == "pointwise-product") {
        require_fields(j, {"kind", "left", "right"}, at);
        return seq::product(sequence_from_json(need(j, "left", at), at + ".left"),
                            sequence_from_json(need(j, "right", at), at + ".right"));
    }
    if (kind == "polynomial") {
        require_fields(j, {"kind", "coefficients"}, at);
        std::vector<cplx> cs;
        for (const auto& c : need(j, "coefficients", at)) cs.push_back(complex_from_json(c, at + ".coefficients"));
        return seq::polynomial(std::move(cs));
    }
    if (kind == "sqrt-abs-quotient") {
        require_fields(j, {"kind", "numerator", "denominator"}, at);
        return seq::sqrt_abs_quotient(sequence_from_json(need(j, "numerator", at), at + ".numerator"),
                                      sequence_from_json(need(j, "denominator", at), at + ".denominator"));
    }
    throw ConfigError(where + ": unknown sequence kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// Operators and kernels
// ---------------------------------------------------------------------------

inline json to_json(const BlockShiftSpec& s) {
    if (s.class_td()) return {{"t", to_json(s.w)}, {"d", to_json(s.d)}};
    return {{"w", to_json(s.w)}, {"v", to_json(s.v)}, {"d", to_json(s.d)}};
}

/// {"w", "v", "d"} or the one-parameter shorthand {"t", "d"} (v = reciprocal-of t).
inline BlockShiftSpec operator_from_json(const json& j, const std::string& where = "operator") {
    require_fields(j, {"w", "v", "d", "t"}, where);
    if (j.contains("t")) {
        if (j.contains("w") || j.contains("v")) throw ConfigError(where + ": give either t or w/v, not both");
        return BlockShiftSpec::td(sequence_from_json(j.at("t"), where + ".t"),
                                  sequence_from_json(need(j, "d", where), where + ".d"));
    }
    return BlockShiftSpec{sequence_from_json(need(j, "w", where), where + ".w"),
                          sequence_from_json(need(j, "v", where), where + ".v"),
                          sequence_from_json(need(j, "d", where), where + ".d")};
}

inline json to_json(const KernelSpec& k) {
    json j;
    switch (k.kind()) {
    case KernelSpec::Kind::lambda: j = {{"kind", "lambda"}, {"lambda", k.parameter()}}; break;
    case KernelSpec::Kind::gamma: j = {{"kind", "gamma"}, {"gamma", k.parameter()}}; break;
    case KernelSpec::Kind::table: j = {{"kind", "table"}, {"coefficients", k.table_values()}}; break;
    case KernelSpec::Kind::product: j = {{"kind", "product"}, {"left", to_json(k.left())}, {"right", to_json(k.right())}}; break;
    }
    j["truncation"] = k.truncation();
    return j;
}

inline KernelSpec kernel_from_json(const json& j, const std::string& where = "kernel") {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::string kind = need(j, "kind", where).get<std::string>();
    const std::string at = where + "(" + kind + ")";
    std::optional<std::size_t> trunc;
    if (j.contains("truncation")) {
        const Index n = as_index(j.at("truncation"), at + ".truncation");
        if (n < 1 || n > (1 << 16)) throw ConfigError(at + ": truncation must lie in [1, 65536]");
        trunc = static_cast<std::size_t>(n);
    }
    if (kind == "lambda") {
        require_fields(j, {"kind", "lambda", "truncation"}, at);
        return KernelSpec::lambda(as_double(need(j, "lambda", at), at), trunc.value_or(default_truncation));
    }
    if (kind == "gamma") {
        require_fields(j, {"kind", "gamma", "truncation"}, at);
        return KernelSpec::gamma(as_double(need(j, "gamma", at), at), trunc.value_or(default_truncation));
    }
    if (kind == "table") {
        require_fields(j, {"kind", "coefficients", "truncation"}, at);
        std::vector<double> cs;
        for (const auto& c : need(j, "coefficients", at)) cs.push_back(as_double(c, at + ".coefficients"));
        return KernelSpec::table(std::move(cs), trunc);
    }
    if (kind == "product") {
        require_fields(j, {"kind", "left", "right", "truncation"}, at);
        return KernelSpec::product(kernel_from_json(need(j, "left", at), at + ".left"),
                                   kernel_from_json(need(j, "right", at), at + ".right"), trunc);
    }
    throw ConfigError(where + ": unknown kernel kind \"" + kind + "\"");
}

inline json to_json(const TruncatedOperator& op) {
    json basis = json::array();
    for (const auto& b : op.index_map) basis.push_back(json::array({b.n, b.component}));
    return {{"window", to_json(op.win)}, {"mode", to_string(op.mode)}, {"basis", basis}, {"matrix", matrix_to_json(op.m)}};
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

inline json to_json(const Witness& w) {
    json j{{"clause", w.clause}, {"value", w.value}, {"threshold", w.threshold}, {"satisfied", w.satisfied}};
    j["n"] = w.n ? json(*w.n) : json(nullptr);
    if (!w.note.empty()) j["note"] = w.note;
    return j;
}

inline json to_json(const Verdict& v) {
    json ws = json::array();
    for (const auto& w : v.witnesses) ws.push_back(to_json(w));
    json j{{"status", to_string(v.status)}, {"witnesses", ws}, {"notes", v.notes}, {"tolerances", v.tolerances}};
    j["fail_index"] = v.fail_index ? json(*v.fail_index) : json(nullptr);
    j["clause"] = v.clause;
    return j;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Parses JSON text; parse errors carry the byte position.
inline json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline json load_json(const std::string& path) { return parse_json(read_file(path), path); }

/// FNV-1a 64-bit hash, hex encoded.
inline std::string fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace blockshift_lab::io

#endif  // BLOCKSHIFT_LAB_IO_HPP
