#include "bernstein/spectral_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "bernstein/errors.hpp"

namespace bernstein {

namespace {

Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::VectorXd& diag, const Eigen::VectorXd& off) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("symmetric tridiagonal eigensolver did not converge");
    return es.eigenvalues();  // ascending
}

void require_centered(const Observable& g, const StationaryMeasure& mu, const char* op) {
    if (g.size() != mu.size()) throw DomainError(std::string(op) + ": observable and measure sizes differ");
    const double mean = mu.expectation(g.values);
    const double scale = std::max(1.0, g.values.cwiseAbs().maxCoeff());
    if (std::abs(mean) > 1e-10 * scale) {
        std::ostringstream os;
        os << op << ": observable is not centered (mu(g) = " << mean << ")";
        throw PreconditionError(os.str());
    }
}

Observable recentered(Eigen::VectorXd G, const StationaryMeasure& mu) {
    Observable out;
    out.values = G.array() - mu.expectation(G);
    out.mean_under = mu.expectation(out.values);
    out.centered = true;
    return out;
}

}  // namespace

Eigen::VectorXd GeneratorMatrix::apply(const Eigen::VectorXd& f) const {
    const long n = size();
    Eigen::VectorXd out = diag.cwiseProduct(f);
    out.head(n - 1) += super.cwiseProduct(f.tail(n - 1));
    out.tail(n - 1) += sub.cwiseProduct(f.head(n - 1));
    return out;
}

Eigen::MatrixXd GeneratorMatrix::dense() const {
    const long n = size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m.diagonal() = diag;
    m.diagonal(1) = super;
    m.diagonal(-1) = sub;
    return m;
}

Eigen::MatrixXd GeneratorMatrix::dense_symmetrized() const {
    const long n = size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m.diagonal() = diag;
    m.diagonal(1) = sym_off;
    m.diagonal(-1) = sym_off;
    return m;
}

GeneratorMatrix build_generator(const BirthDeathSpec& spec, long N) {
    return build_generator(spec, invariant_measure(spec, N));
}

GeneratorMatrix build_generator(const BirthDeathSpec& spec, const StationaryMeasure& mu) {
    const long N = mu.truncation;
    GeneratorMatrix g;
    g.measure = mu;
    g.diag.resize(N + 1);
    g.super.resize(N);
    g.sub.resize(N);
    g.sym_off.resize(N);
    for (long k = 0; k < N; ++k) {
        g.super[k] = spec.b(k);
        g.sub[k] = spec.a(k + 1);
        g.sym_off[k] = std::sqrt(g.super[k] * g.sub[k]);
    }
    for (long k = 0; k <= N; ++k) {
        double d = 0.0;
        if (k < N) d -= g.super[k];
        if (k > 0) d -= g.sub[k - 1];
        g.diag[k] = d;
    }
    return g;
}

SpectralConstants spectral_gap(const GeneratorMatrix& gen) {
    if (gen.size() < 2) throw DomainError("spectral_gap: need at least two states");
    const Eigen::VectorXd ev = tridiagonal_eigenvalues(gen.diag, gen.sym_off);
    const double lambda_1 = -ev[ev.size() - 2];
    if (!(lambda_1 > 0)) throw NumericError("spectral_gap: nonpositive gap");
    SpectralConstants c;
    c.lambda_1 = lambda_1;
    c.c_P = 1.0 / lambda_1;
    std::ostringstream os;
    os << "tridiagonal eigensolve, truncation N=" << gen.truncation();
    c.provenance_c_P = os.str();
    return c;
}

double schrodinger_top_eig(const GeneratorMatrix& gen, const Observable& g, double s) {
    if (g.size() != gen.size()) throw DomainError("schrodinger_top_eig: observable size mismatch");
    if (!g.values.allFinite()) throw DomainError("schrodinger_top_eig: observable must be finite");
    const Eigen::VectorXd ev = tridiagonal_eigenvalues(gen.diag + s * g.values, gen.sym_off);
    return ev[ev.size() - 1];
}

Observable poisson_solve_explicit(const BirthDeathSpec& spec, const StationaryMeasure& mu, const Observable& g) {
    return poisson_solve_explicit(build_generator(spec, mu), g);
}

Observable poisson_solve_explicit(const GeneratorMatrix& gen, const Observable& g) {
    require_centered(g, gen.measure, "poisson_solve_explicit");
    const long N = gen.truncation();
    // tail[k] = Σ_{j=k}^{N} (μ_j/μ_k) g(j), with μ_{k+1}/μ_k = b_k/a_{k+1}.
    Eigen::VectorXd tail(N + 1);
    tail[N] = g.values[N];
    for (long k = N - 1; k >= 0; --k) tail[k] = g.values[k] + gen.super[k] / gen.sub[k] * tail[k + 1];

    Eigen::VectorXd G(N + 1);
    G[0] = 0.0;
    for (long k = 0; k < N; ++k) G[k + 1] = G[k] + tail[k + 1] / gen.sub[k];
    return recentered(std::move(G), gen.measure);
}

Observable poisson_solve_spectral(const GeneratorMatrix& gen, const Observable& g) {
    require_centered(g, gen.measure, "poisson_solve_spectral");
    const long n = gen.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
    A.topLeftCorner(n, n) = -gen.dense();
    A.block(0, n, n, 1).setOnes();
    A.block(n, 0, 1, n) = gen.measure.weights.transpose();
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = g.values;
    rhs[n] = 0.0;

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) throw NumericError("poisson_solve_spectral: singular bordered system");

    Eigen::VectorXd G = sol.head(n);
    const Eigen::VectorXd residual = -gen.apply(G) - g.values;
    const double scale = std::max(1.0, g.values.cwiseAbs().maxCoeff());
    if (residual.cwiseAbs().maxCoeff() > 1e-6 * scale)
        throw NumericError("poisson_solve_spectral: residual above tolerance");
    return recentered(std::move(G), gen.measure);
}

double asymptotic_variance(const GeneratorMatrix& gen, const Observable& g, PoissonRoute route) {
    const Observable G =
        route == PoissonRoute::explicit_sum ? poisson_solve_explicit(gen, g) : poisson_solve_spectral(gen, g);
    const double s2 = 2.0 * gen.measure.weights.dot(G.values.cwiseProduct(g.values));
    return std::max(0.0, s2);
}

double lip_rho_norm(const Eigen::VectorXd& g, const Eigen::VectorXd& rho) {
    if (g.size() != rho.size()) throw DomainError("lip_rho_norm: size mismatch");
    if (g.size() < 2) return 0.0;
    double best = 0.0;
    for (long k = 0; k + 1 < g.size(); ++k) {
        const double dr = rho[k + 1] - rho[k];
        if (!(dr > 0)) throw DomainError("lip_rho_norm: rho must be strictly increasing");
        best = std::max(best, std::abs(g[k + 1] - g[k]) / dr);
    }
    return best;
}

}  // namespace bernstein
