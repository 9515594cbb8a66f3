#pragma once

// The M-constant of every route that turns a functional inequality (or a
// drift condition, or a Lipschitz Poisson solution) into the Bernstein bound
//   ν(g) ≤ √(2σ² I) + M I.
// Functional-inequality constants are explicit inputs; only the birth-death
// spectral gap is computed in-house.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bernstein/chain_models.hpp"
#include "bernstein/spectral_engine.hpp"

namespace bernstein {

enum class MRoute {
    bounded,
    logsobolev,
    gamma,
    phi_sobolev,
    lyapunov,
    lyapunov_local,
    lipschitz_poisson,
    w1i,
    tc,
    bd_lipschitz_K,
    mminf_growth,
    mminf_lip,
    analytic_sharp,
};

std::string to_string(MRoute r);

struct MInput {
    std::string name;
    double value = 0.0;
    std::string provenance;
};

struct MConstant {
    double value = 0.0;
    MRoute route = MRoute::bounded;
    std::vector<MInput> inputs;
    std::string note;
};

/// c_P ‖g⁺‖_∞.
MConstant m_bounded(double c_P, double sup_g_plus);

struct LogSobolevM {
    MConstant m;
    double argmin_lambda = 0.0;
    bool degenerate = false;  // c_LS = 0: the infimum is the λ → 0 limit, 0
};

/// inf_{λ>0} (1/λ)[c_P Λ(λ) + 2 c_LS] by a log-grid scan followed by
/// golden-section refinement around the best grid points.
LogSobolevM m_logsobolev(double c_P, double c_LS, const std::function<double(double)>& Lambda,
                         double lambda_upper = std::numeric_limits<double>::infinity());

/// 2 c_LS √(c_P ‖Γ(g)‖_∞).
MConstant m_gamma(double c_P, double c_LS, double gamma_g_sup);

/// N_Ψ(g⁺) · c_{P,Φ}.
MConstant m_phi_sobolev(double N_Psi_g_plus, double c_P_Phi);

/// 2 c_{P,Φ} ‖g‖²_Ψ̃: the variance bound 2⟨(−L)⁻¹g, g⟩ ≤ 2 c_{P,Φ}‖g‖²_Ψ̃.
double sigma2_phi_bound(double c_P_Phi, double norm_g_psi_tilde);

struct KPhi {
    double plus = 0.0;      // sup g⁺/φ
    double absolute = 0.0;  // sup |g|/φ
    bool sup_at_edge = false;  // attained at the last probed point: the true sup may lie beyond
};

/// Minimal C with g⁺ ≤ Cφ on the probed points.
KPhi k_phi(const Eigen::VectorXd& g, const Eigen::VectorXd& phi);

/// K_φ(g⁺)(b c_P + 1).
MConstant m_lyapunov(double K_phi_g_plus, double b, double c_P);

/// K[(√λ + 1)² + δ] for g ≤ K(n + δ) on the M/M/∞ queue.
MConstant m_mminf_growth(double K, double delta, double lambda);

/// K_φ(g⁺)(b κ_C + 1), κ_C the local Poincaré constant on C.
MConstant m_lyapunov_local(double K_phi_g_plus, double b, double kappa_C);

/// 2 √(c_P ‖Γ(G)‖_∞), G the Poisson solution.
MConstant m_lipschitz_poisson(double c_P, double gamma_G_sup);

/// Γ(G)(n) = ½(b_n (G(n+1) − G(n))² + a_n (G(n−1) − G(n))²) on 0..N−1
/// (row N is omitted: its birth term was truncated away).
Eigen::VectorXd carre_du_champ(const GeneratorMatrix& gen, const Eigen::VectorXd& G);

/// ‖g‖_Lip √(2[(√λ + 1)² + λ]) on the M/M/∞ queue.
MConstant m_mminf_lip(double lip_g, double lambda);

struct KBirthDeath {
    double K = 0.0;
    long argsup = 0;
    bool sup_at_edge = false;
};

/// K = ½ sup_n (1_{n≥1} T_n² / (a_n μ_n²) + T_{n+1}² / (b_n μ_n²)),
/// T_n = Σ_{i≥n} μ_i (ρ(i) − μ(ρ)). Ratios T_n/μ_n are accumulated backward,
/// so the computation never touches μ_n directly.
KBirthDeath k_birth_death(const BirthDeathSpec& spec, const StationaryMeasure& mu, const Eigen::VectorXd& rho);

/// 2 √(c_P K) ‖g‖_{Lip(ρ)}.
MConstant m_bd_lipschitz(double c_P, double K, double lip_rho_g);

/// ‖g‖_{Lip(d)} √(2 c_P c_G).
MConstant m_w1i(double lip_g, double c_P, double c_G);

/// g*(y) = max_x (g(x) − c(x, y)) on a finite space; cost(x, y) is row x, column y.
Eigen::VectorXd sup_convolution(const Eigen::VectorXd& g, const Eigen::MatrixXd& cost);

/// μ(g*) c_P + c_P α⁻¹(1/c_P).
MConstant m_tc(double mu_g_star, double c_P, double alpha_inv_at_inv_cP);

/// 4θ² for g₀ = x² − θ on OU, or 1 for g₀ = n − λ on M/M/∞.
MConstant m_analytic_sharp(double value, std::string source);

}  // namespace bernstein
