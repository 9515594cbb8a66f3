#include "bernstein/reporting.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "bernstein/errors.hpp"

#ifndef BERNSTEIN_VERSION
#define BERNSTEIN_VERSION "0.0.0"
#endif

namespace bernstein {

std::string tool_version() { return BERNSTEIN_VERSION; }

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

nlohmann::json RunManifest::to_json() const {
    return {{"command", command}, {"argv", argv},       {"model", model},         {"parameters", parameters},
            {"seed", seed},       {"version", version}, {"timestamp", timestamp}, {"outputs", outputs}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.argv = j.at("argv").get<std::vector<std::string>>();
        m.model = j.value("model", nlohmann::json{});
        m.parameters = j.value("parameters", nlohmann::json{});
        m.seed = j.value("seed", std::uint64_t{0});
        m.version = j.value("version", std::string{});
        m.timestamp = j.value("timestamp", std::string{});
        m.outputs = j.value("outputs", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("manifest: ") + e.what());
    }
    return m;
}

RunManifest make_manifest(std::string command, std::vector<std::string> argv) {
    RunManifest m;
    m.command = std::move(command);
    m.argv = std::move(argv);
    m.version = tool_version();
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    m.timestamp = buf;
    return m;
}

void write_tail_csv(std::ostream& out, const TailReport& report, bool header) {
    if (header) out << kTailCsvHeader << '\n';
    for (const auto& row : report.rows) {
        out << report.model << ',' << report.observable << ',' << row.bound_route << ',' << format_number(row.t) << ','
            << format_number(row.r) << ',' << row.estimate.n_paths << ',' << format_number(row.estimate.p_hat) << ','
            << format_number(row.estimate.ci_low) << ',' << format_number(row.estimate.ci_high) << ','
            << format_number(row.bound) << ',' << to_string(row.verdict) << '\n';
    }
}

nlohmann::json tail_report_json(const TailReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"t", row.t},
                        {"r", row.r},
                        {"n_paths", row.estimate.n_paths},
                        {"successes", row.estimate.successes},
                        {"p_hat", row.estimate.p_hat},
                        {"ci_low", row.estimate.ci_low},
                        {"ci_high", row.estimate.ci_high},
                        {"method", to_string(row.estimate.method)},
                        {"one_sided", row.estimate.one_sided},
                        {"bound", row.bound},
                        {"bound_route", row.bound_route},
                        {"verdict", to_string(row.verdict)}});
    }
    return {{"model", report.model},
            {"g", report.observable},
            {"route", report.route},
            {"bernstein",
             {{"sigma2", report.params.sigma2}, {"M", report.params.m_const}, {"prefactor", report.params.prefactor}}},
            {"rows", rows},
            {"counts",
             {{"pass", report.count(Verdict::pass)},
              {"fail", report.count(Verdict::fail)},
              {"inconclusive", report.count(Verdict::inconclusive)}}}};
}

void write_ledger_table(std::ostream& out, const Ledger& ledger) {
    out << "model: " << ledger.model << "   g: " << ledger.observable << '\n';
    out << "c_P = " << format_number(ledger.c_P) << "   [" << ledger.c_P_provenance << "]\n";
    if (ledger.sigma2) out << "sigma2 = " << format_number(*ledger.sigma2) << "   [" << ledger.sigma2_provenance << "]\n";
    out << std::left << std::setw(20) << "route" << std::setw(8) << "status" << std::setw(14) << "M" << "detail\n";
    for (const auto& row : ledger.rows) {
        std::ostringstream m;
        if (row.m)
            m << std::setprecision(8) << row.m->value;
        else
            m << '-';
        out << std::setw(20) << row.route << std::setw(8) << to_string(row.status) << std::setw(14) << m.str();
        if (row.status == LedgerStatus::needs) {
            out << "needs: " << row.detail;
        } else {
            std::string sep;
            if (row.m)
                for (const auto& in : row.m->inputs) {
                    out << sep << in.name << '=' << format_number(in.value);
                    sep = " ";
                }
            if (!row.detail.empty()) out << (sep.empty() ? "" : "; ") << row.detail;
        }
        out << '\n';
    }
    out << std::right;
}

void write_ledger_csv(std::ostream& out, const Ledger& ledger) {
    out << "model,g,route,status,M,detail\n";
    for (const auto& row : ledger.rows) {
        std::string detail = row.detail;
        for (auto& ch : detail)
            if (ch == ',') ch = ';';
        out << ledger.model << ',' << ledger.observable << ',' << row.route << ',' << to_string(row.status) << ','
            << (row.m ? format_number(row.m->value) : "") << ',' << detail << '\n';
    }
}

nlohmann::json ledger_json(const Ledger& ledger) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : ledger.rows) {
        nlohmann::json r{{"route", row.route}, {"status", to_string(row.status)}, {"detail", row.detail}};
        if (row.m) {
            r["M"] = row.m->value;
            nlohmann::json in = nlohmann::json::array();
            for (const auto& i : row.m->inputs)
                in.push_back({{"name", i.name}, {"value", i.value}, {"provenance", i.provenance}});
            r["inputs"] = in;
        }
        rows.push_back(r);
    }
    nlohmann::json j{{"model", ledger.model},
                     {"g", ledger.observable},
                     {"c_P", {{"value", ledger.c_P}, {"provenance", ledger.c_P_provenance}}},
                     {"routes", rows}};
    if (ledger.sigma2) j["sigma2"] = {{"value", *ledger.sigma2}, {"provenance", ledger.sigma2_provenance}};
    return j;
}

}  // namespace bernstein
