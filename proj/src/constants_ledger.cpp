#include "bernstein/constants_ledger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bernstein/errors.hpp"

namespace bernstein {

namespace {

void require_nonneg(double v, const char* name, const char* op) {
    if (!(v >= 0)) throw DomainError(std::string(op) + ": " + name + " must be >= 0");
}

MConstant make(MRoute route, double value, std::vector<MInput> inputs, std::string note = {}) {
    MConstant m;
    m.route = route;
    m.value = value;
    m.inputs = std::move(inputs);
    m.note = std::move(note);
    return m;
}

}  // namespace

std::string to_string(MRoute r) {
    switch (r) {
        case MRoute::bounded: return "bounded";
        case MRoute::logsobolev: return "logsobolev";
        case MRoute::gamma: return "gamma";
        case MRoute::phi_sobolev: return "phi_sobolev";
        case MRoute::lyapunov: return "lyapunov";
        case MRoute::lyapunov_local: return "lyapunov_local";
        case MRoute::lipschitz_poisson: return "lipschitz_poisson";
        case MRoute::w1i: return "w1i";
        case MRoute::tc: return "tc";
        case MRoute::bd_lipschitz_K: return "bd_lipschitz_K";
        case MRoute::mminf_growth: return "mminf_growth";
        case MRoute::mminf_lip: return "mminf_lip";
        case MRoute::analytic_sharp: return "sharp-analytic";
    }
    return "?";
}

MConstant m_bounded(double c_P, double sup_g_plus) {
    require_nonneg(c_P, "c_P", "m_bounded");
    require_nonneg(sup_g_plus, "sup g+", "m_bounded");
    return make(MRoute::bounded, c_P * sup_g_plus, {{"c_P", c_P, "input"}, {"sup_g_plus", sup_g_plus, "input"}});
}

LogSobolevM m_logsobolev(double c_P, double c_LS, const std::function<double(double)>& Lambda,
                         double lambda_upper) {
    require_nonneg(c_P, "c_P", "m_logsobolev");
    require_nonneg(c_LS, "c_LS", "m_logsobolev");
    LogSobolevM out;
    std::vector<MInput> inputs{{"c_P", c_P, "input"}, {"c_LS", c_LS, "input"}};
    if (c_LS == 0) {
        out.m = make(MRoute::logsobolev, 0.0, inputs, "c_LS = 0: infimum is the lambda -> 0 limit");
        out.degenerate = true;
        return out;
    }
    auto objective = [&](double lam) {
        const double v = Lambda(lam);
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        return (c_P * v + 2 * c_LS) / lam;
    };

    const bool bounded = std::isfinite(lambda_upper);
    const double hi = bounded ? lambda_upper : 1e8;
    const double lo = bounded ? lambda_upper * 1e-10 : 1e-8;
    constexpr int n = 400;
    std::vector<double> grid(n), vals(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
        vals[i] = objective(grid[i]);
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + 3, order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    if (!std::isfinite(vals[order[0]]))
        throw DomainError("m_logsobolev: Lambda is infinite on the whole search domain (route inapplicable)");

    double best_lam = grid[order[0]];
    double best_val = vals[order[0]];
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int s = 0; s < 3; ++s) {
        const int i = order[s];
        double a = grid[std::max(0, i - 1)];
        double b = grid[std::min(n - 1, i + 1)];
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = objective(x1), f2 = objective(x2);
        for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = objective(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = objective(x2);
            }
        }
        for (auto [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}, std::pair{grid[i], vals[i]}}) {
            if (f < best_val) {
                best_val = f;
                best_lam = x;
            }
        }
    }
    if (bounded && objective(lambda_upper) <= best_val) {
        best_val = objective(lambda_upper);
        best_lam = lambda_upper;
    }
    out.argmin_lambda = best_lam;
    inputs.push_back({"argmin_lambda", best_lam, "numeric"});
    out.m = make(MRoute::logsobolev, best_val, inputs);
    return out;
}

MConstant m_gamma(double c_P, double c_LS, double gamma_g_sup) {
    require_nonneg(c_P, "c_P", "m_gamma");
    require_nonneg(c_LS, "c_LS", "m_gamma");
    require_nonneg(gamma_g_sup, "sup Gamma(g)", "m_gamma");
    return make(MRoute::gamma, 2 * c_LS * std::sqrt(c_P * gamma_g_sup),
                {{"c_P", c_P, "input"}, {"c_LS", c_LS, "input"}, {"sup_gamma_g", gamma_g_sup, "input"}});
}

MConstant m_phi_sobolev(double N_Psi_g_plus, double c_P_Phi) {
    require_nonneg(N_Psi_g_plus, "N_Psi(g+)", "m_phi_sobolev");
    require_nonneg(c_P_Phi, "c_P_Phi", "m_phi_sobolev");
    return make(MRoute::phi_sobolev, N_Psi_g_plus * c_P_Phi,
                {{"N_Psi_g_plus", N_Psi_g_plus, "input"}, {"c_P_Phi", c_P_Phi, "input"}});
}

double sigma2_phi_bound(double c_P_Phi, double norm_g_psi_tilde) {
    require_nonneg(c_P_Phi, "c_P_Phi", "sigma2_phi_bound");
    require_nonneg(norm_g_psi_tilde, "norm", "sigma2_phi_bound");
    return 2 * c_P_Phi * norm_g_psi_tilde * norm_g_psi_tilde;
}

KPhi k_phi(const Eigen::VectorXd& g, const Eigen::VectorXd& phi) {
    if (g.size() != phi.size() || g.size() == 0) throw DomainError("k_phi: size mismatch or empty domain");
    KPhi k;
    long arg = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (!(phi[i] > 0)) throw DomainError("k_phi: phi must be positive");
        const double plus = std::max(0.0, g[i]) / phi[i];
        if (plus > k.plus) {
            k.plus = plus;
            arg = i;
        }
        k.absolute = std::max(k.absolute, std::abs(g[i]) / phi[i]);
    }
    // Still increasing at the end of the probe: the supremum may be a limit.
    const Eigen::Index last = g.size() - 1;
    k.sup_at_edge = k.plus > 0 && (arg == last || (last > 0 && std::max(0.0, g[last]) / phi[last] >
                                                                   std::max(0.0, g[last - 1]) / phi[last - 1]));
    return k;
}

MConstant m_lyapunov(double K_phi_g_plus, double b, double c_P) {
    require_nonneg(K_phi_g_plus, "K_phi(g+)", "m_lyapunov");
    require_nonneg(b, "b", "m_lyapunov");
    require_nonneg(c_P, "c_P", "m_lyapunov");
    return make(MRoute::lyapunov, K_phi_g_plus * (b * c_P + 1),
                {{"K_phi_g_plus", K_phi_g_plus, "input"}, {"b", b, "input"}, {"c_P", c_P, "input"}});
}

MConstant m_mminf_growth(double K, double delta, double lambda) {
    require_nonneg(K, "K", "m_mminf_growth");
    require_nonneg(delta, "delta", "m_mminf_growth");
    require_nonneg(lambda, "lambda", "m_mminf_growth");
    const double s = std::sqrt(lambda) + 1;
    return make(MRoute::mminf_growth, K * (s * s + delta),
                {{"K", K, "input"}, {"delta", delta, "input"}, {"lambda", lambda, "model"}});
}

MConstant m_lyapunov_local(double K_phi_g_plus, double b, double kappa_C) {
    require_nonneg(K_phi_g_plus, "K_phi(g+)", "m_lyapunov_local");
    require_nonneg(b, "b", "m_lyapunov_local");
    require_nonneg(kappa_C, "kappa_C", "m_lyapunov_local");
    return make(MRoute::lyapunov_local, K_phi_g_plus * (b * kappa_C + 1),
                {{"K_phi_g_plus", K_phi_g_plus, "input"}, {"b", b, "input"}, {"kappa_C", kappa_C, "input"}});
}

MConstant m_lipschitz_poisson(double c_P, double gamma_G_sup) {
    require_nonneg(c_P, "c_P", "m_lipschitz_poisson");
    require_nonneg(gamma_G_sup, "sup Gamma(G)", "m_lipschitz_poisson");
    return make(MRoute::lipschitz_poisson, 2 * std::sqrt(c_P * gamma_G_sup),
                {{"c_P", c_P, "input"}, {"sup_gamma_G", gamma_G_sup, "input"}});
}

Eigen::VectorXd carre_du_champ(const GeneratorMatrix& gen, const Eigen::VectorXd& G) {
    const long N = gen.truncation();
    if (G.size() != N + 1) throw DomainError("carre_du_champ: size mismatch");
    Eigen::VectorXd out(N);
    for (long n = 0; n < N; ++n) {
        const double up = G[n + 1] - G[n];
        double v = gen.super[n] * up * up;
        if (n > 0) {
            const double down = G[n - 1] - G[n];
            v += gen.sub[n - 1] * down * down;
        }
        out[n] = 0.5 * v;
    }
    return out;
}

MConstant m_mminf_lip(double lip_g, double lambda) {
    require_nonneg(lip_g, "Lip(g)", "m_mminf_lip");
    require_nonneg(lambda, "lambda", "m_mminf_lip");
    const double s = std::sqrt(lambda) + 1;
    return make(MRoute::mminf_lip, lip_g * std::sqrt(2 * (s * s + lambda)),
                {{"lip_g", lip_g, "input"}, {"lambda", lambda, "model"}});
}

KBirthDeath k_birth_death(const BirthDeathSpec& spec, const StationaryMeasure& mu, const Eigen::VectorXd& rho) {
    const long N = mu.truncation;
    if (rho.size() != N + 1) throw DomainError("k_birth_death: rho size mismatch");
    for (long k = 0; k < N; ++k)
        if (!(rho[k + 1] > rho[k])) throw DomainError("k_birth_death: rho must be strictly increasing");
    const double mean = mu.expectation(rho);

    // ratio[n] = T_n / μ_n = Σ_{i≥n} (μ_i/μ_n)(ρ(i) − μ(ρ)).
    Eigen::VectorXd ratio(N + 1);
    ratio[N] = rho[N] - mean;
    for (long n = N - 1; n >= 0; --n) ratio[n] = (rho[n] - mean) + spec.b(n) / spec.a(n + 1) * ratio[n + 1];

    KBirthDeath k;
    double best = -1.0;
    for (long n = 0; n <= N; ++n) {
        double term = 0.0;
        if (n >= 1) term += ratio[n] * ratio[n] / spec.a(n);
        if (n < N) {
            // T_{n+1}/μ_n = (b_n/a_{n+1}) ratio[n+1].
            const double next = spec.b(n) / spec.a(n + 1) * ratio[n + 1];
            term += next * next / spec.b(n);
        }
        if (term > best) {
            best = term;
            k.argsup = n;
        }
    }
    k.K = 0.5 * best;
    k.sup_at_edge = k.argsup >= N - N / 10;
    return k;
}

MConstant m_bd_lipschitz(double c_P, double K, double lip_rho_g) {
    require_nonneg(c_P, "c_P", "m_bd_lipschitz");
    require_nonneg(K, "K", "m_bd_lipschitz");
    require_nonneg(lip_rho_g, "Lip_rho(g)", "m_bd_lipschitz");
    return make(MRoute::bd_lipschitz_K, 2 * std::sqrt(c_P * K) * lip_rho_g,
                {{"c_P", c_P, "input"}, {"K", K, "input"}, {"lip_rho_g", lip_rho_g, "input"}});
}

MConstant m_w1i(double lip_g, double c_P, double c_G) {
    require_nonneg(lip_g, "Lip(g)", "m_w1i");
    require_nonneg(c_P, "c_P", "m_w1i");
    require_nonneg(c_G, "c_G", "m_w1i");
    return make(MRoute::w1i, lip_g * std::sqrt(2 * c_P * c_G),
                {{"lip_g", lip_g, "input"}, {"c_P", c_P, "input"}, {"c_G", c_G, "input"}});
}

Eigen::VectorXd sup_convolution(const Eigen::VectorXd& g, const Eigen::MatrixXd& cost) {
    if (cost.rows() != g.size() || cost.cols() == 0) throw DomainError("sup_convolution: cost must be |X| x |Y|");
    Eigen::VectorXd out(cost.cols());
    for (Eigen::Index y = 0; y < cost.cols(); ++y) out[y] = (g - cost.col(y)).maxCoeff();
    return out;
}

MConstant m_tc(double mu_g_star, double c_P, double alpha_inv_at_inv_cP) {
    if (!(mu_g_star >= 0))
        throw DomainError("m_tc: mu(g*) must be >= 0 (g* >= g and mu(g) = 0); inputs are inconsistent");
    require_nonneg(c_P, "c_P", "m_tc");
    require_nonneg(alpha_inv_at_inv_cP, "alpha^-1(1/c_P)", "m_tc");
    return make(MRoute::tc, mu_g_star * c_P + c_P * alpha_inv_at_inv_cP,
                {{"mu_g_star", mu_g_star, "input"}, {"c_P", c_P, "input"},
                 {"alpha_inv_at_inv_cP", alpha_inv_at_inv_cP, "input"}});
}

MConstant m_analytic_sharp(double value, std::string source) {
    require_nonneg(value, "M", "m_analytic_sharp");
    return make(MRoute::analytic_sharp, value, {{"M", value, "analytic"}}, std::move(source));
}

}  // namespace bernstein
