#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "bernstein/ledger.hpp"
#include "bernstein/simulation.hpp"

namespace bernstein {

std::string tool_version();

/// Everything needed to regenerate an output: the argv of the run plus the
/// parsed model spec and parameters.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    nlohmann::json model;
    nlohmann::json parameters;
    std::uint64_t seed = 0;
    std::string version;
    std::string timestamp;  // UTC, ISO 8601
    std::vector<std::string> outputs;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

RunManifest make_manifest(std::string command, std::vector<std::string> argv);

inline constexpr const char* kTailCsvHeader = "model,g,route,t,r,n_paths,p_hat,ci_low,ci_high,bound,verdict";

/// Shortest round-trip representation of a double.
std::string format_number(double x);

void write_tail_csv(std::ostream& out, const TailReport& report, bool header = true);
nlohmann::json tail_report_json(const TailReport& report);

void write_ledger_table(std::ostream& out, const Ledger& ledger);
void write_ledger_csv(std::ostream& out, const Ledger& ledger);
nlohmann::json ledger_json(const Ledger& ledger);

}  // namespace bernstein
