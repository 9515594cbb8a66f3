#pragma once

// Truncated birth-death generators and the spectral quantities built on them:
// spectral gap, top of the Schrödinger spectrum Λ(s g), Poisson solutions and
// the asymptotic variance σ²(g) = 2⟨(−L)⁻¹g, g⟩_μ.
//
// Eigenproblems use the symmetrization S = D^{1/2} L D^{−1/2}, D = diag(μ),
// which is symmetric tridiagonal with off-diagonal √(b_k a_{k+1}).

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "bernstein/chain_models.hpp"

namespace bernstein {

struct GeneratorMatrix {
    Eigen::VectorXd diag;   // L(k,k), k = 0..N
    Eigen::VectorXd super;  // L(k,k+1) = b_k, k = 0..N−1
    Eigen::VectorXd sub;    // L(k+1,k) = a_{k+1}, k = 0..N−1
    Eigen::VectorXd sym_off;  // S(k,k+1) = S(k+1,k)
    StationaryMeasure measure;

    long truncation() const { return measure.truncation; }
    long size() const { return diag.size(); }

    /// (L f)(k) for k = 0..N.
    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
    Eigen::MatrixXd dense() const;
    Eigen::MatrixXd dense_symmetrized() const;
};

/// Row 0 carries only the birth term; row N drops b_N (reflecting truncation).
GeneratorMatrix build_generator(const BirthDeathSpec& spec, long N);
GeneratorMatrix build_generator(const BirthDeathSpec& spec, const StationaryMeasure& mu);

struct SpectralConstants {
    double c_P = 0.0;
    double lambda_1 = 0.0;
    std::optional<double> c_LS;  // never computed here; carried for analytic models
    std::string provenance_c_P;
    std::string provenance_c_LS;
};

/// Second-smallest eigenvalue of −S and c_P = 1/λ₁.
SpectralConstants spectral_gap(const GeneratorMatrix& gen);

/// Largest eigenvalue of S + s·diag(g), i.e. Λ(s g) for the truncated chain.
double schrodinger_top_eig(const GeneratorMatrix& gen, const Observable& g, double s);

/// Poisson solution from G(k+1) − G(k) = Σ_{j>k} μ_j g(j) / (μ_{k+1} a_{k+1}),
/// accumulated as a backward recursion on ratios μ_j/μ_k (no underflow).
Observable poisson_solve_explicit(const BirthDeathSpec& spec, const StationaryMeasure& mu, const Observable& g);
Observable poisson_solve_explicit(const GeneratorMatrix& gen, const Observable& g);

/// Poisson solution from a pivoted LU solve of the bordered system
///   [ −L  1 ] [G]   [g]
///   [ μᵀ  0 ] [c] = [0],
/// which pins μ(G) = 0 and removes the constant null direction.
Observable poisson_solve_spectral(const GeneratorMatrix& gen, const Observable& g);

enum class PoissonRoute { explicit_sum, linear_solve };

double asymptotic_variance(const GeneratorMatrix& gen, const Observable& g,
                           PoissonRoute route = PoissonRoute::explicit_sum);

/// sup_k |g(k+1) − g(k)| / (ρ(k+1) − ρ(k)) over k = 0..N−1.
double lip_rho_norm(const Eigen::VectorXd& g, const Eigen::VectorXd& rho);

/// Value at truncation N, value at 2N and their difference as an error estimate.
struct TruncationEstimate {
    long n = 0;
    double value = 0.0;
    double value_doubled = 0.0;
    double error_estimate() const { return std::abs(value_doubled - value); }
};

template <typename F>
TruncationEstimate with_truncation_estimate(const BirthDeathSpec& spec, long N, F&& quantity) {
    TruncationEstimate e;
    e.n = N;
    e.value = quantity(build_generator(spec, N));
    e.value_doubled = quantity(build_generator(spec, 2 * N));
    return e;
}

}  // namespace bernstein
