#include "bernstein/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bernstein/errors.hpp"
#include "bernstein/lyapunov.hpp"
#include "bernstein/spectral_engine.hpp"

namespace bernstein {

namespace {

constexpr long kLedgerMaxN = 5000;

std::string format_double(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

struct Builder {
    Ledger ledger;
    const std::map<std::string, double>& inputs;

    std::vector<std::string> missing(std::initializer_list<const char*> names) const {
        std::vector<std::string> out;
        for (const char* n : names)
            if (!inputs.count(n)) out.emplace_back(n);
        return out;
    }
    double in(const char* name) const { return inputs.at(name); }

    void ok(const std::string& route, MConstant m, std::string detail = {}) {
        ledger.rows.push_back({route, LedgerStatus::ok, std::move(m), std::move(detail)});
    }
    void na(const std::string& route, std::string why) {
        ledger.rows.push_back({route, LedgerStatus::not_applicable, std::nullopt, std::move(why)});
    }
    // True (and a row is pushed) when some input is missing.
    bool needs(const std::string& route, std::initializer_list<const char*> names) {
        const auto miss = missing(names);
        if (miss.empty()) return false;
        std::string s;
        for (const auto& m : miss) s += (s.empty() ? "" : ", ") + m;
        ledger.rows.push_back({route, LedgerStatus::needs, std::nullopt, s});
        return true;
    }
};

bool near_edge(long argsup, long N) { return argsup >= N - N / 10; }

void chain_routes(Builder& B, const ModelSpec& model, const ObservableSpec& obs) {
    const auto& spec = *model.chain;
    long N = 0;
    std::string trunc_note;
    try {
        N = choose_truncation(spec, model.tail_epsilon, model.max_n);
    } catch (const TruncationError&) {
        N = kLedgerMaxN;
        trunc_note = "tail bound not reached; probe truncated";
    }
    N = std::clamp<long>(N, 200, kLedgerMaxN);
    const auto gen = build_generator(spec, N);
    const auto g = center_observable(
        Observable::from_function([&](long n) { return obs.g(static_cast<double>(n)); }, N), gen.measure);

    if (B.inputs.count("c_p")) {
        B.ledger.c_P = B.in("c_p");
        B.ledger.c_P_provenance = "input";
    } else {
        B.ledger.c_P = spectral_gap(gen).c_P;
        B.ledger.c_P_provenance = "spectral gap at N=" + std::to_string(N);
        // A gap that keeps closing as N grows has no finite limit worth quoting.
        const double half = spectral_gap(build_generator(spec, N / 2)).c_P;
        if (std::abs(B.ledger.c_P - half) > 0.01 * B.ledger.c_P)
            B.ledger.c_P_provenance += "; unstable in N (N/2 gives " + format_double(half) + ")";
    }
    const double cP = B.ledger.c_P;
    B.ledger.sigma2 = asymptotic_variance(gen, g);
    B.ledger.sigma2_provenance = "Poisson solve at N=" + std::to_string(N) + (trunc_note.empty() ? "" : "; " + trunc_note);
    const bool mm = spec.name == "mm_infinity";
    const double lambda = mm ? spec.known_params.at("lambda") : 0.0;

    if (obs.sup_plus)
        B.ok("bounded", m_bounded(cP, *obs.sup_plus));
    else
        B.na("bounded", "g+ is unbounded");

    if (!B.needs("logsobolev", {"c_ls"})) {
        double upper = std::numeric_limits<double>::infinity();
        if (!obs.sup_plus) {
            if (mm && obs.g0_multiple > 0)
                upper = (1.0 - 1e-9) / obs.g0_multiple;
            else
                upper = -1;
        }
        if (upper < 0) {
            B.na("logsobolev", "domain of Lambda unknown for unbounded g");
        } else {
            auto Lambda = [&](double s) { return schrodinger_top_eig(gen, g, s); };
            auto ls = m_logsobolev(cP, B.in("c_ls"), Lambda, upper);
            std::ostringstream os;
            os << "argmin lambda = " << ls.argmin_lambda << (ls.degenerate ? " (degenerate)" : "");
            B.ok("logsobolev", ls.m, os.str());
        }
    }

    if (!B.needs("gamma", {"c_ls"})) {
        const Eigen::VectorXd gam = carre_du_champ(gen, g.values);
        Eigen::Index arg = 0;
        const double sup = gam.maxCoeff(&arg);
        if (near_edge(arg, N))
            B.na("gamma", "Gamma(g) unbounded on the probe");
        else
            B.ok("gamma", m_gamma(cP, B.in("c_ls"), sup));
    }

    if (!B.needs("phi_sobolev", {"c_p_phi"})) {
        if (obs.sup_plus)
            B.ok("phi_sobolev", m_phi_sobolev(*obs.sup_plus, B.in("c_p_phi")), "Phi(x)=|x|, N_Psi(g+) = sup g+");
        else
            B.na("phi_sobolev", "Phi(x)=|x| needs g+ bounded");
    }

    // Geometric drift with U = 2^n and phi0 = (n+1)/2.
    const long probe = std::max<long>(1000, 4 * N);
    auto phi0 = [](long n) { return (n + 1) / 2.0; };
    long N_from = 0;
    for (long n = probe; n >= 0; --n) {
        const double death = n == 0 ? 0.0 : spec.a(n);
        if (death - 2 * spec.b(n) < phi0(n)) {
            N_from = n + 1;
            break;
        }
    }
    std::optional<LyapunovCertificate> cert;
    if (N_from <= probe / 2) cert = check_lyapunov_bd(spec, phi0, 2.0, N_from, probe);
    std::optional<KPhi> kp;
    if (cert && cert->pass) {
        Eigen::VectorXd gv(probe + 1), phi(probe + 1);
        for (long n = 0; n <= probe; ++n) {
            gv[n] = obs.g(static_cast<double>(n)) - obs.mean;
            phi[n] = cert->phi_chain(n);
        }
        kp = k_phi(gv, phi);
    }
    auto lyap_note = [&] {
        std::ostringstream os;
        os << "U=2^n, phi=(n+1)/4, b=" << cert->b << (kp->sup_at_edge ? "; K_phi sup at probe edge" : "");
        return os.str();
    };
    if (kp)
        B.ok("lyapunov", m_lyapunov(kp->plus, cert->b, cP), lyap_note());
    else
        B.na("lyapunov", "geometric drift a_n - 2 b_n >= (n+1)/2 fails on the probe");
    if (!B.needs("lyapunov_local", {"kappa_c"})) {
        if (kp)
            B.ok("lyapunov_local", m_lyapunov_local(kp->plus, cert->b, B.in("kappa_c")), lyap_note());
        else
            B.na("lyapunov_local", "no drift certificate");
    }

    if (mm) {
        double K = 0;
        for (long n = 0; n <= probe; ++n) K = std::max(K, (obs.g(static_cast<double>(n)) - obs.mean) / (n + 1.0));
        B.ok("mminf_growth", m_mminf_growth(K, 1.0, lambda), "g <= K(n + 1)");
        if (obs.lip)
            B.ok("mminf_lip", m_mminf_lip(*obs.lip, lambda));
        else
            B.na("mminf_lip", "g is not Lipschitz");
    } else {
        B.na("mminf_growth", "M/M/infinity only");
        B.na("mminf_lip", "M/M/infinity only");
    }

    {
        const auto G = poisson_solve_explicit(gen, g);
        const Eigen::VectorXd gam = carre_du_champ(gen, G.values);
        Eigen::Index arg = 0;
        const double sup = gam.maxCoeff(&arg);
        if (near_edge(arg, N))
            B.na("lipschitz_poisson", "Gamma(G) unbounded on the probe");
        else
            B.ok("lipschitz_poisson", m_lipschitz_poisson(cP, sup));
    }

    {
        Eigen::VectorXd rho(N + 1);
        double acc = 0;
        for (long k = 0; k <= N; ++k) rho[k] = (acc += 1.0 / std::sqrt(k + 1.0));
        const auto K = k_birth_death(spec, gen.measure, rho);
        const double lip = lip_rho_norm(g.values, rho);
        Eigen::Index arg = 0;
        Eigen::VectorXd ratios(N);
        for (long k = 0; k < N; ++k) ratios[k] = std::abs(g.values[k + 1] - g.values[k]) / (rho[k + 1] - rho[k]);
        ratios.maxCoeff(&arg);
        if (near_edge(arg, N))
            B.na("bd_lipschitz_K", "Lip_rho(g) unbounded on the probe, rho(n) = sum 1/sqrt(k+1)");
        else
            B.ok("bd_lipschitz_K", m_bd_lipschitz(cP, K.K, lip),
                 std::string("rho(n) = sum 1/sqrt(k+1)") + (K.sup_at_edge ? "; K sup at probe edge" : ""));
    }

    if (!B.needs("w1i", {"c_g"})) {
        if (obs.lip)
            B.ok("w1i", m_w1i(*obs.lip, cP, B.in("c_g")));
        else
            B.na("w1i", "g is not Lipschitz");
    }
    if (!B.needs("tc", {"mu_g_star", "alpha_inv_at_inv_cp"}))
        B.ok("tc", m_tc(B.in("mu_g_star"), cP, B.in("alpha_inv_at_inv_cp")));

    if (mm && obs.g0_multiple > 0)
        B.ok("sharp-analytic", m_analytic_sharp(obs.g0_multiple, "M(g0) = 1 on M/M/infinity"));
    else
        B.na("sharp-analytic", "known for multiples of g0 on M/M/infinity and OU");
}

void ou_routes(Builder& B, const ObservableSpec& obs, double theta) {
    const auto k = ou_constants(theta);
    B.ledger.c_P = k.c_P;
    B.ledger.c_P_provenance = "analytic: c_P = theta";
    const double cLS = *k.c_LS;
    if (obs.g0_multiple != 0) {
        B.ledger.sigma2 = obs.g0_multiple * obs.g0_multiple * ou_sigma2_g0(theta);
        B.ledger.sigma2_provenance = "analytic: 2 theta^3";
    }

    if (obs.sup_plus)
        B.ok("bounded", m_bounded(theta, *obs.sup_plus));
    else
        B.na("bounded", "g+ is unbounded");

    if (obs.g0_multiple > 0) {
        const double c = obs.g0_multiple;
        auto Lambda = [c, theta](double l) { return ou_lambda_quadratic(c * l, theta); };
        auto ls = m_logsobolev(theta, cLS, Lambda, (1.0 - 1e-12) * ou_lambda_pole(theta) / c);
        std::ostringstream os;
        os << "c_LS = theta (analytic); argmin lambda = " << ls.argmin_lambda;
        B.ok("logsobolev", ls.m, os.str());
    } else {
        B.na("logsobolev", "Lambda is known in closed form for multiples of g0 only");
    }

    if (obs.gamma_sup)
        B.ok("gamma", m_gamma(theta, cLS, *obs.gamma_sup), "c_LS = theta (analytic)");
    else
        B.na("gamma", "Gamma(g) is unbounded");

    if (!B.needs("phi_sobolev", {"c_p_phi"})) {
        if (obs.sup_plus)
            B.ok("phi_sobolev", m_phi_sobolev(*obs.sup_plus, B.in("c_p_phi")), "Phi(x)=|x|, N_Psi(g+) = sup g+");
        else
            B.na("phi_sobolev", "Phi(x)=|x| needs g+ bounded");
    }
    if (!B.needs("w1i", {"c_g"})) {
        if (obs.lip)
            B.ok("w1i", m_w1i(*obs.lip, theta, B.in("c_g")));
        else
            B.na("w1i", "g is not Lipschitz");
    }
    if (obs.g0_multiple > 0)
        B.ok("sharp-analytic", m_analytic_sharp(obs.g0_multiple * ou_sharp_m(theta), "M(g0) = 4 theta^2 on OU"));
    else
        B.na("sharp-analytic", "known for multiples of g0 only");
}

void potential_routes(Builder& B, const ObservableSpec& obs) {
    if (B.inputs.count("c_p")) {
        B.ledger.c_P = B.in("c_p");
        B.ledger.c_P_provenance = "input";
    }
    if (!B.needs("bounded", {"c_p"})) {
        if (obs.sup_plus)
            B.ok("bounded", m_bounded(B.in("c_p"), *obs.sup_plus));
        else
            B.na("bounded", "g+ is unbounded");
    }
    if (!B.needs("gamma", {"c_p", "c_ls"})) {
        if (obs.gamma_sup)
            B.ok("gamma", m_gamma(B.in("c_p"), B.in("c_ls"), *obs.gamma_sup));
        else
            B.na("gamma", "Gamma(g) is unbounded");
    }
    if (!B.needs("phi_sobolev", {"c_p_phi"})) {
        if (obs.sup_plus)
            B.ok("phi_sobolev", m_phi_sobolev(*obs.sup_plus, B.in("c_p_phi")), "Phi(x)=|x|, N_Psi(g+) = sup g+");
        else
            B.na("phi_sobolev", "Phi(x)=|x| needs g+ bounded");
    }
    if (!B.needs("w1i", {"c_p", "c_g"})) {
        if (obs.lip)
            B.ok("w1i", m_w1i(*obs.lip, B.in("c_p"), B.in("c_g")));
        else
            B.na("w1i", "g is not Lipschitz");
    }
    if (!B.needs("lyapunov_local", {"kappa_c"}))
        B.na("lyapunov_local", "drift certificates for potentials come from check_lyapunov_kustr2");
}

}  // namespace

std::string to_string(LedgerStatus s) {
    switch (s) {
        case LedgerStatus::ok: return "ok";
        case LedgerStatus::needs: return "needs";
        case LedgerStatus::not_applicable: return "n/a";
    }
    return "?";
}

const LedgerRow* Ledger::find(const std::string& route) const {
    for (const auto& r : rows)
        if (r.route == route) return &r;
    return nullptr;
}

Ledger build_ledger(const ModelSpec& model, const ObservableSpec& obs, const std::map<std::string, double>& inputs) {
    for (const auto& [k, v] : inputs)
        if (!(v >= 0) || !std::isfinite(v)) throw DomainError("input " + k + " must be finite and >= 0");
    Builder B{{}, inputs};
    B.ledger.model = model.name();
    B.ledger.observable = obs.name;
    switch (model.kind) {
        case ModelKind::birth_death: chain_routes(B, model, obs); break;
        case ModelKind::ou: ou_routes(B, obs, model.ou->theta); break;
        case ModelKind::potential: potential_routes(B, obs); break;
    }
    return B.ledger;
}

}  // namespace bernstein
