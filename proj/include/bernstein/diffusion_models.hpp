#pragma once

// Diffusions L = Δ − ∇V·∇ on ℝ^d with μ ∝ e^{−V}, and the Ornstein–Uhlenbeck
// special case L f = f″ − θ⁻¹ x f′, μ = N(0, θ).

#include <functional>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "bernstein/random.hpp"
#include "bernstein/spectral_engine.hpp"

namespace bernstein {

struct OUSpec {
    double theta = 1.0;

    OUSpec() = default;
    explicit OUSpec(double theta_);
};

/// Exact transition: N(x e^{−dt/θ}, θ(1 − e^{−2dt/θ})).
double ou_transition_sample(double x, double dt, double theta, RandomStream& rng);

/// c_P = c_LS = θ.
SpectralConstants ou_constants(double theta);

/// Λ(λ g₀) for g₀(x) = x² − θ:
///   (1/(4θ)) (1 − √(1 − 4θ²λ))²  for λ ≤ 1/(4θ²), +∞ beyond.
double ou_lambda_quadratic(double lambda, double theta);

inline double ou_lambda_pole(double theta) { return 1.0 / (4.0 * theta * theta); }
inline double ou_sigma2_g0(double theta) { return 2.0 * theta * theta * theta; }
inline double ou_sharp_m(double theta) { return 4.0 * theta * theta; }

/// max over the grid of |[L + ((a − a²)/θ²) g₀] U − (a²/θ) U| / U for
/// U = exp(a x² / (2θ)), i.e. how well U is a positive eigenfunction.
double ou_eigen_residual(double a, double theta, std::span<const double> grid);

/// V(x) = v(|x|); derivatives are with respect to the radius.
struct RadialProfile {
    std::function<double(double)> v;
    std::function<double(double)> dv;
    std::function<double(double)> d2v;
};

struct PotentialDiffusion {
    int dim = 1;
    std::string builtin;  // "power", "subexp", "cauchy", "quadratic", "" for custom
    double beta = 0.0;
    std::function<double(const Eigen::VectorXd&)> V;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradV;
    std::optional<std::function<double(const Eigen::VectorXd&)>> laplV;
    std::optional<RadialProfile> radial;
};

PotentialDiffusion radial_potential(RadialProfile profile, int dim, std::string name = {});

/// |x|^β for |x| > 1, patched on the unit ball by the even quartic matching
/// value, first and second derivative at |x| = 1 (C² overall).
PotentialDiffusion power_potential(double beta, int dim = 1);

/// Same profile as power_potential, tagged for β ∈ (0, 1).
PotentialDiffusion subexponential_potential(double beta, int dim = 1);

/// ((d + β)/2) log(1 + |x|²).
PotentialDiffusion cauchy_potential(double beta, int dim = 1);

/// |x|²/(2θ): the OU drift −x/θ.
PotentialDiffusion quadratic_potential(double theta, int dim = 1);

/// x − ∇V(x) dt + √(2 dt) ξ.
Eigen::VectorXd euler_maruyama_step(const Eigen::VectorXd& x, double dt, const PotentialDiffusion& diff,
                                    RandomStream& rng);

/// ∫_0^∞ f(r) dr (exp-sinh quadrature). Radial fast path for normalizing
/// constants and moments of e^{−V}.
double half_line_integral(const std::function<double(double)>& f);

/// ∫_{ℝ^d} h(|x|) e^{−V(x)} dx / ∫ e^{−V} for a radial potential.
double radial_expectation(const PotentialDiffusion& diff, const std::function<double(double)>& h);

}  // namespace bernstein
