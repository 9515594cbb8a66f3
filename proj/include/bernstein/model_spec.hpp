#pragma once

// JSON model specs and observable specs shared by the CLI and the tests.
//
//   {"type": "birth_death", "rates": {"builtin": "mm_infinity", "lambda": 1},
//    "truncation": {"epsilon": 1e-12, "max_n": 1000000}}
//   {"type": "birth_death", "rates": {"builtin": "harmonic_death", "a": 2}}
//   {"type": "birth_death", "rates": {"table": {"birth": [...], "death": [...]}}}
//   {"type": "ou", "theta": 1}
//   {"type": "potential", "builtin": "subexp" | "cauchy" | "power" | "quadratic", "beta": 0.5, "d": 1}

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

#include "bernstein/chain_models.hpp"
#include "bernstein/diffusion_models.hpp"
#include "bernstein/simulation.hpp"

namespace bernstein {

enum class ModelKind { birth_death, ou, potential };

struct ModelSpec {
    ModelKind kind = ModelKind::birth_death;
    nlohmann::json source;
    std::optional<BirthDeathSpec> chain;
    std::optional<OUSpec> ou;
    std::optional<PotentialDiffusion> potential;
    double tail_epsilon = 1e-12;
    long max_n = 1'000'000;

    std::string name() const;
};

/// Throws SpecError on malformed input.
ModelSpec parse_model_spec(const nlohmann::json& j);
ModelSpec load_model_spec(const std::filesystem::path& path);

Model make_model(const ModelSpec& spec);

/// Observable grammar:
///   g0 | centered_identity   chain: n − μ(n);  OU: x² − θ
///   x2_minus_theta           OU only
///   identity                 chain: n − μ(n); diffusions: x (centered by symmetry)
///   clip:K                   min(g0, K)
///   const:c                  the constant c
///   scale:c:<spec>           c times another observable
struct ObservableSpec {
    std::string name;
    std::function<double(double)> g;
    double mean = 0.0;                 // μ(g)
    std::optional<double> sup_plus;    // sup g⁺ when bounded above
    std::optional<double> lip;         // ‖g‖_Lip when finite
    std::optional<double> gamma_sup;   // ‖Γ(g)‖_∞ for diffusions when finite
    double g0_multiple = 0.0;          // g = c·g0 with c = g0_multiple (0: not a multiple)
};

ObservableSpec parse_observable(const std::string& text, const ModelSpec& model);

PathObservable to_path_observable(const ObservableSpec& obs);

}  // namespace bernstein
