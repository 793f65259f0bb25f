#ifndef BLOCKSHIFT_LAB_CASE_RUNNER_HPP
#define BLOCKSHIFT_LAB_CASE_RUNNER_HPP

// Case files: a named operator or kernel payload, a window, tolerances and a
// list of checks. run_case executes the checks and assembles a report whose
// body is a deterministic function of the input.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blockshift_lab/blockshift.hpp"
#include "blockshift_lab/io.hpp"
#include "blockshift_lab/irreducibility.hpp"
#include "blockshift_lab/kernels.hpp"
#include "blockshift_lab/oracle.hpp"
#include "blockshift_lab/seqcore.hpp"
#include "blockshift_lab/similarity.hpp"
#include "blockshift_lab/types.hpp"

namespace blockshift_lab {

inline constexpr const char* tool_name = "blockshift-lab";
inline constexpr const char* tool_version = "0.1.0";

struct CheckSpec {
    std::string check;
    io::json params = io::json::object();
};

struct CaseFile {
    std::string name;
    std::string description;
    std::vector<std::string> tags;
    std::optional<BlockShiftSpec> op;
    std::optional<KernelSpec> kernel;
    std::optional<Window> window;
    std::map<std::string, double> tolerances;
    std::vector<CheckSpec> checks;
    std::string source_text;  // raw bytes, hashed into the report
};

struct CaseOverrides {
    std::optional<Window> window;
    std::optional<double> tol;
    bool strict = false;
};

struct CheckResult {
    std::string check;
    Verdict verdict;
    io::json details = io::json::object();
};

struct CaseReport {
    std::string name;
    std::string input_hash;
    std::optional<Window> window;
    std::map<std::string, double> tolerances;
    std::vector<CheckResult> results;
    std::string error;  // config/budget error that stopped the case
    int exit_code = 0;
};

CaseFile parse_case(const io::json& j, std::string source_text = {});

/// Names accepted in a case file's "check" field.
std::vector<std::string> known_checks();

CaseReport run_case(const CaseFile& file, const CaseOverrides& ov = {});

/// Loads and runs a case file; parse and validation errors yield exit code 2.
CaseReport run_case_file(const std::string& path, const CaseOverrides& ov = {});

std::string utc_timestamp();

/// Report body; `generated_at` is the only field that varies between identical runs.
io::json report_json(const CaseReport& rep, bool with_timestamp = true);

/// One line per check plus a status line.
std::string summary_text(const CaseReport& rep);

}  // namespace blockshift_lab

#endif  // BLOCKSHIFT_LAB_CASE_RUNNER_HPP
