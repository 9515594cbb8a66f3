#pragma once

// Assembles every M route for a (model, observable) pair: computed when the
// route applies and its inputs are present, otherwise a row saying what is
// missing or why the route does not apply.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bernstein/constants_ledger.hpp"
#include "bernstein/model_spec.hpp"

namespace bernstein {

enum class LedgerStatus { ok, needs, not_applicable };

std::string to_string(LedgerStatus s);

struct LedgerRow {
    std::string route;
    LedgerStatus status = LedgerStatus::not_applicable;
    std::optional<MConstant> m;
    std::string detail;  // missing constant names, or the reason the route is skipped
};

struct Ledger {
    std::string model;
    std::string observable;
    double c_P = 0.0;
    std::string c_P_provenance;
    std::optional<double> sigma2;
    std::string sigma2_provenance;
    std::vector<LedgerRow> rows;

    const LedgerRow* find(const std::string& route) const;
};

/// Recognized inputs: c_p, c_ls, c_g, c_p_phi, kappa_c, and mu_g_star with
/// alpha_inv_at_inv_cp for the transport route.
Ledger build_ledger(const ModelSpec& model, const ObservableSpec& obs, const std::map<std::string, double>& inputs);

}  // namespace bernstein
