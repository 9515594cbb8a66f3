#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace bernstein {

/// A Young function Φ and its convex conjugate Ψ(r) = sup_{λ≥0}(λr − Φ(λ)).
/// Either side may take the value +∞.
struct OrliczSpec {
    std::string name;
    std::function<double(double)> Phi;
    std::function<double(double)> Psi;
};

/// Φ(x) = x; Ψ = +∞·1_{x>1}, so N_Ψ(h) = ‖h‖_∞.
OrliczSpec young_linear();
/// Φ(x) = x²; Ψ(y) = y²/4.
OrliczSpec young_quadratic();
/// Φ(x) = eˣ − 1; Ψ(y) = y log y − y + 1 for y ≥ 1, 0 below.
OrliczSpec young_exponential();

/// Φ̃(x) = Φ(x²) with its conjugate Ψ̃ evaluated by numeric Legendre duality.
OrliczSpec tilde(const OrliczSpec& spec);

/// Swap the roles of Φ and Ψ.
OrliczSpec conjugate_side(const OrliczSpec& spec);

/// N_Φ(g) = inf{c > 0 : Σ_i w_i Φ(|g_i|/c) ≤ 1} by bisection in log c;
/// +∞ when no finite c satisfies the constraint.
double orlicz_gauge_norm(const std::function<double(double)>& young, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& weights);

}  // namespace bernstein
