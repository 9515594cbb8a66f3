#pragma once

// Grid certificates for the drift conditions that feed the Lyapunov routes of
// the M-ledger. Every check is a statement about the finite grid it was run
// on; the underlying conditions are asymptotic and are not extrapolated.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bernstein/chain_models.hpp"
#include "bernstein/diffusion_models.hpp"

namespace bernstein {

enum class LyapunovCondition { kustr, simpl, kustr2, bd, bd_subgeom };

std::string to_string(LyapunovCondition c);

struct LyapunovCertificate {
    LyapunovCondition condition = LyapunovCondition::kustr;
    std::map<std::string, double> params;
    long grid_points = 0;
    double c = 0.0;       // certified constant (kustr / simpl); 0 on failure
    double margin = 0.0;  // minimum slack observed on the grid
    bool pass = false;
    std::string note;

    // kustr2: φ = a φ̃ on the complement of C = B(0, R).
    std::function<double(const Eigen::VectorXd&)> phi;
    double ball_radius = 0.0;
    std::optional<bool> integrable;

    // Birth-death certificates.
    std::function<double(long)> phi_chain;
    double b = 0.0;
    std::optional<RecurrenceReport> recurrence;
};

using Grid = std::vector<Eigen::VectorXd>;

/// Points r·e for geometric radii in [r_min, r_max] and directions ±e₁ and
/// ±(1,…,1)/√d.
Grid radial_shell_grid(int dim, double r_min, double r_max, int n_radii = 200);

/// (1 − a)|∇V|² − ΔV ≥ c (1 + |x|^γ) for |x| ≥ R. Without `c` the largest
/// grid-valid c is certified, and the check fails when the ratio visibly
/// decays to zero over the outer decade of the grid.
LyapunovCertificate check_lyapunov_kustr(const PotentialDiffusion& diff, double a, double gamma, const Grid& grid,
                                         double R, std::optional<double> c = std::nullopt);

/// |x|^{γ/2} (x/|x|)·∇V(x) ≥ c (1 + |x|^γ) for |x| ≥ R.
LyapunovCertificate check_lyapunov_simpl(const PotentialDiffusion& diff, double gamma, const Grid& grid, double R,
                                         std::optional<double> c = std::nullopt);

/// (1 − a)|∇V|² − ΔV ≥ φ̃(x) for |x| ≥ R, plus ∫ e^{(a−1)V} < ∞. On success
/// carries φ = a φ̃ and C = B(0, R).
LyapunovCertificate check_lyapunov_kustr2(const PotentialDiffusion& diff, double a,
                                          const std::function<double(const Eigen::VectorXd&)>& phi_tilde,
                                          const Grid& grid, double R);

/// a_n − κ b_n ≥ φ₀(n) for n ∈ [N_from, N_probe]. With U = κⁿ,
/// −LU/U(n) = ((κ−1)/κ)(a_n − κ b_n), giving φ = (1 − 1/κ)φ₀ and
/// b = max_{n<N_from} ((κ−1)/κ)(φ₀(n) + κ b_n − a_n)⁺.
LyapunovCertificate check_lyapunov_bd(const BirthDeathSpec& spec, const std::function<double(long)>& phi0,
                                      double kappa, long N_from, long N_probe = 10'000);

/// Sub-geometric chain check with U(n) = (1+n)^m: c_n = a_n − b_n > 0 beyond
/// some N, Σ n^m μ_n < ∞ (tail regression of log μ_n), positive recurrence
/// (heuristic), and φ(n) = (m − δ) c_n / (1 + n) with δ = m/2.
LyapunovCertificate check_lyapunov_bd_subgeom(const BirthDeathSpec& spec, double m, long N_probe = 20'000);

}  // namespace bernstein
