#ifndef BLOCKSHIFT_LAB_TYPES_HPP
#define BLOCKSHIFT_LAB_TYPES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockshift_lab {

using cplx = std::complex<double>;
using Index = std::int64_t;

inline constexpr double default_tol = 1e-10;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sequence or kernel was evaluated outside its domain.
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::optional<Index> index = std::nullopt)
        : Error(index ? what + " (at n=" + std::to_string(*index) + ")" : what), index_(index) {}

    std::optional<Index> index() const noexcept { return index_; }

private:
    std::optional<Index> index_;
};

/// Input (case file, spec, CLI argument) is malformed.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A check's preconditions do not hold for the given input.
class InapplicableError : public Error {
public:
    using Error::Error;
};

/// Requested computation exceeds the dense-solve budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Window: finite stand-in for Z, inclusive on both ends.
// ---------------------------------------------------------------------------

class Window {
public:
    Window(Index n_min, Index n_max) : n_min_(n_min), n_max_(n_max) {
        if (n_min > n_max)
            throw ConfigError("window: n_min " + std::to_string(n_min) + " > n_max " + std::to_string(n_max));
    }

    Index n_min() const noexcept { return n_min_; }
    Index n_max() const noexcept { return n_max_; }
    Index length() const noexcept { return n_max_ - n_min_ + 1; }
    bool contains(Index n) const noexcept { return n >= n_min_ && n <= n_max_; }

    /// Distance (in indices) from n to the nearest window edge.
    Index edge_distance(Index n) const noexcept { return std::min(n - n_min_, n_max_ - n); }

    friend bool operator==(const Window&, const Window&) = default;

private:
    Index n_min_;
    Index n_max_;
};

// ---------------------------------------------------------------------------
// Tolerance helpers
// ---------------------------------------------------------------------------

inline double magnitude_scale(double a) { return std::max(1.0, std::abs(a)); }

/// |a-b| <= tol * max(1, |a|, |b|)
inline bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool close(cplx a, cplx b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// "q is not real": |Im q| exceeds tol scaled by the magnitude of q.
inline bool is_non_real(cplx q, double tol) { return std::abs(q.imag()) > tol * magnitude_scale(std::abs(q)); }

// ---------------------------------------------------------------------------
// Verdict: structured, window-scoped outcome of a hypothesis check.
// ---------------------------------------------------------------------------

enum class Status { holds_on_window, fails_at, inapplicable };

inline std::string to_string(Status s) {
    switch (s) {
    case Status::holds_on_window: return "holds-on-window";
    case Status::fails_at: return "fails-at";
    case Status::inapplicable: return "inapplicable";
    }
    return "unknown";
}

/// One evaluated clause at one index. `value` is the quantity tested,
/// `threshold` what it was compared against.
struct Witness {
    std::optional<Index> n;
    std::string clause;
    double value = 0.0;
    double threshold = 0.0;
    bool satisfied = false;
    std::string note;
};

struct Verdict {
    Status status = Status::holds_on_window;
    std::optional<Index> fail_index;
    std::string clause;  // violated clause for fails-at, reason for inapplicable
    std::vector<Witness> witnesses;
    std::vector<std::string> notes;
    std::map<std::string, double> tolerances;

    bool holds() const noexcept { return status == Status::holds_on_window; }

    static Verdict inapplicable(std::string reason) {
        Verdict v;
        v.status = Status::inapplicable;
        v.clause = std::move(reason);
        return v;
    }

    void fail(std::optional<Index> n, std::string which) {
        if (status != Status::holds_on_window) return;
        status = Status::fails_at;
        fail_index = n;
        clause = std::move(which);
    }

    /// Witnesses for one clause, in insertion order.
    std::vector<Witness> clause_witnesses(const std::string& name) const {
        std::vector<Witness> out;
        for (const auto& w : witnesses)
            if (w.clause == name) out.push_back(w);
        return out;
    }
};

}  // namespace blockshift_lab

#endif  // BLOCKSHIFT_LAB_TYPES_HPP
