// bernstein: bound tables, M ledgers, spectral quantities and Monte Carlo
// validation of Bernstein tail bounds for birth-death chains and diffusions.
//
// Exit codes: 0 ok, 2 usage or domain error, 3 validation failure, 4 numeric failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bernstein/bound_algebra.hpp"
#include "bernstein/errors.hpp"
#include "bernstein/ledger.hpp"
#include "bernstein/model_spec.hpp"
#include "bernstein/reporting.hpp"
#include "bernstein/simulation.hpp"
#include "bernstein/spectral_engine.hpp"

using namespace bernstein;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kValidationFail = 3;
constexpr int kNumeric = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::map<std::string, double> parse_inputs(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("--inputs expects name=value, got '" + item + "'");
        try {
            std::size_t used = 0;
            const double v = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
            out[item.substr(0, eq)] = v;
        } catch (const std::logic_error&) {
            throw UsageError("--inputs: bad number in '" + item + "'");
        }
    }
    return out;
}

// Writes `body` to <out>.<ext> and its manifest to <out>.manifest.json, or
// prints to stdout when out is empty.
void emit(const std::string& out, const std::string& ext, const std::string& body, RunManifest manifest) {
    if (out.empty()) {
        std::cout << body;
        return;
    }
    const std::string data_path = out + "." + ext;
    std::ofstream data(data_path);
    if (!data) throw UsageError("cannot write " + data_path);
    data << body;
    manifest.outputs = {data_path};
    std::ofstream man(out + ".manifest.json");
    if (!man) throw UsageError("cannot write " + out + ".manifest.json");
    man << manifest.to_json().dump(2) << '\n';
}

struct BoundArgs {
    double sigma2 = 0, m = 0, prefactor = 1;
    std::vector<double> t_grid{1}, r_grid;
    std::string format = "table", out;
};

int cmd_bound(const BoundArgs& a, const std::vector<std::string>& argv) {
    const BernsteinParamsd p(a.sigma2, a.m, a.prefactor);
    if (a.r_grid.empty()) throw UsageError("bound: --r-grid is required");
    std::ostringstream os;
    json rows = json::array();
    if (a.format == "table")
        os << std::setw(10) << "t" << std::setw(12) << "r" << std::setw(16) << "alpha" << std::setw(16) << "alpha_inv"
           << std::setw(16) << "envelope" << std::setw(16) << "classic" << '\n';
    else if (a.format == "csv")
        os << "t,r,alpha,alpha_inv_of_alpha,envelope,classic\n";
    for (double t : a.t_grid) {
        if (!(t > 0)) throw DomainError("bound: t must be > 0");
        for (double r : a.r_grid) {
            if (!(r >= 0)) throw DomainError("bound: r must be >= 0");
            const double al = rate_alpha(p, r);
            const double inv = rate_alpha_inv(p, al);
            const double env = tail_envelope(p, t, r);
            const double cl = tail_envelope_classic(p, t, r);
            if (a.format == "table")
                os << std::setw(10) << format_number(t) << std::setw(12) << format_number(r) << std::setw(16)
                   << std::setprecision(8) << al << std::setw(16) << inv << std::setw(16) << env << std::setw(16) << cl
                   << '\n';
            else if (a.format == "csv")
                os << format_number(t) << ',' << format_number(r) << ',' << format_number(al) << ','
                   << format_number(inv) << ',' << format_number(env) << ',' << format_number(cl) << '\n';
            else
                rows.push_back({{"t", t}, {"r", r}, {"alpha", al}, {"alpha_inv_of_alpha", inv}, {"envelope", env},
                                {"classic", cl}});
        }
    }
    if (a.format == "json")
        os << json{{"sigma2", p.sigma2}, {"M", p.m_const}, {"prefactor", p.prefactor}, {"rows", rows}}.dump(2)
           << '\n';
    auto man = make_manifest("bound", argv);
    man.parameters = {{"sigma2", a.sigma2}, {"M", a.m}, {"prefactor", a.prefactor}, {"t_grid", a.t_grid},
                      {"r_grid", a.r_grid}};
    emit(a.out, a.format == "table" ? "txt" : a.format, os.str(), man);
    return kOk;
}

struct ConstantsArgs {
    std::string model, observable = "g0", format = "table", out;
    std::vector<std::string> inputs;
};

int cmd_constants(const ConstantsArgs& a, const std::vector<std::string>& argv) {
    const auto model = load_model_spec(a.model);
    const auto obs = parse_observable(a.observable, model);
    const auto inputs = parse_inputs(a.inputs);
    const auto ledger = build_ledger(model, obs, inputs);
    std::ostringstream os;
    if (a.format == "table")
        write_ledger_table(os, ledger);
    else if (a.format == "csv")
        write_ledger_csv(os, ledger);
    else
        os << ledger_json(ledger).dump(2) << '\n';
    auto man = make_manifest("constants", argv);
    man.model = model.source;
    man.parameters = {{"observable", a.observable}, {"inputs", inputs}};
    emit(a.out, a.format == "table" ? "txt" : a.format, os.str(), man);
    return kOk;
}

struct ValidateArgs {
    std::string model, observable = "g0", route, method = "clopper_pearson", format = "csv", out;
    std::optional<double> sigma2, m;
    bool auto_sigma2 = false;
    std::vector<double> t_grid, r_grid;
    long paths = 10'000;
    std::uint64_t seed = 1;
    double dt = 0.01;
    unsigned threads = 0;
    std::vector<std::string> inputs;
};

int cmd_validate(const ValidateArgs& a, const std::vector<std::string>& argv) {
    if (a.paths < 100) throw DomainError("validate: --paths must be >= 100");
    if (a.t_grid.empty() || a.r_grid.empty()) throw UsageError("validate: --t-grid and --r-grid are required");
    if (a.sigma2.has_value() == a.auto_sigma2) throw UsageError("validate: give exactly one of --sigma2, --auto-sigma2");
    if (a.m.has_value() == !a.route.empty()) throw UsageError("validate: give exactly one of --m, --route");

    const auto spec = load_model_spec(a.model);
    const auto obs = parse_observable(a.observable, spec);
    std::optional<Ledger> ledger;
    if (a.auto_sigma2 || !a.route.empty()) ledger = build_ledger(spec, obs, parse_inputs(a.inputs));

    double sigma2 = 0;
    if (a.sigma2) {
        sigma2 = *a.sigma2;
    } else {
        if (!ledger->sigma2) throw UsageError("validate: no sigma2 available for this model and observable");
        sigma2 = *ledger->sigma2;
    }
    double m = 0;
    std::string route = "input";
    if (a.m) {
        m = *a.m;
    } else {
        const auto* row = ledger->find(a.route);
        if (!row) throw UsageError("validate: unknown route '" + a.route + "'");
        if (row->status != LedgerStatus::ok)
            throw UsageError("validate: route " + a.route + " unavailable (" + to_string(row->status) + ": " +
                             row->detail + ")");
        m = row->m->value;
        route = a.route;
    }

    ValidationConfig cfg;
    cfg.t_grid = a.t_grid;
    cfg.r_grid = a.r_grid;
    cfg.n_paths = a.paths;
    cfg.seed = a.seed;
    cfg.dt = a.dt;
    cfg.threads = a.threads;
    if (a.method == "wilson")
        cfg.method = IntervalMethod::wilson;
    else if (a.method == "clopper_pearson" || a.method == "cp")
        cfg.method = IntervalMethod::clopper_pearson;
    else
        throw UsageError("validate: --method must be wilson or clopper_pearson");

    const auto report = validate_bound(make_model(spec), to_path_observable(obs), BernsteinParamsd(sigma2, m, 1.0),
                                       route, cfg);
    std::ostringstream os;
    if (a.format == "json")
        os << tail_report_json(report).dump(2) << '\n';
    else
        write_tail_csv(os, report);
    auto man = make_manifest("validate", argv);
    man.model = spec.source;
    man.seed = a.seed;
    man.parameters = {{"observable", a.observable}, {"sigma2", sigma2}, {"M", m},           {"route", route},
                      {"t_grid", a.t_grid},         {"r_grid", a.r_grid}, {"paths", a.paths}, {"dt", a.dt},
                      {"method", to_string(cfg.method)}};
    emit(a.out, a.format, os.str(), man);
    const long fails = report.count(Verdict::fail);
    if (fails > 0) {
        std::cerr << "validate: " << fails << " fail verdict(s)\n";
        return kValidationFail;
    }
    return kOk;
}

struct SpectralArgs {
    std::string model, observable = "g0", format = "table", out, poisson_out;
    long N = 200;
    std::vector<double> s_grid;
};

int cmd_spectral(const SpectralArgs& a, const std::vector<std::string>& argv) {
    const auto spec = load_model_spec(a.model);
    if (spec.kind != ModelKind::birth_death) throw UsageError("spectral: needs a birth_death model");
    if (a.N < 2) throw DomainError("spectral: --N must be >= 2");
    const auto obs = parse_observable(a.observable, spec);
    const auto gen = build_generator(*spec.chain, a.N);
    const auto g = center_observable(
        Observable::from_function([&](long n) { return obs.g(static_cast<double>(n)); }, a.N), gen.measure);
    const auto gap = spectral_gap(gen);
    const double s2_explicit = asymptotic_variance(gen, g, PoissonRoute::explicit_sum);
    const double s2_linear = asymptotic_variance(gen, g, PoissonRoute::linear_solve);

    const bool closed = spec.chain->name == "mm_infinity" && obs.g0_multiple != 0;
    const double lambda = closed ? spec.chain->known_params.at("lambda") : 0.0;
    std::ostringstream os;
    json curve = json::array();
    for (double s : a.s_grid) {
        json row{{"s", s}, {"Lambda", schrodinger_top_eig(gen, g, s)}};
        const double cs = s * obs.g0_multiple;
        if (closed && cs < 1) row["closed_form"] = lambda * cs * cs / (1 - cs);
        curve.push_back(row);
    }
    if (a.format == "json") {
        os << json{{"model", spec.name()},  {"g", obs.name},           {"N", a.N},
                   {"lambda_1", gap.lambda_1}, {"c_P", gap.c_P},         {"sigma2_explicit", s2_explicit},
                   {"sigma2_linear_solve", s2_linear}, {"Lambda_curve", curve}}
                  .dump(2)
           << '\n';
    } else {
        os << "model: " << spec.name() << "   g: " << obs.name << "   N = " << a.N << '\n'
           << "lambda_1 = " << format_number(gap.lambda_1) << "   c_P = " << format_number(gap.c_P) << '\n'
           << "sigma2 = " << format_number(s2_explicit) << " (explicit)   " << format_number(s2_linear)
           << " (linear solve)\n";
        if (!curve.empty()) {
            os << std::setw(10) << "s" << std::setw(22) << "Lambda(s g)" << (closed ? "          closed form" : "")
               << '\n';
            for (const auto& row : curve) {
                os << std::setw(10) << format_number(row["s"].get<double>()) << std::setw(22)
                   << format_number(row["Lambda"].get<double>());
                if (row.contains("closed_form")) os << std::setw(22) << format_number(row["closed_form"].get<double>());
                os << '\n';
            }
        }
    }
    auto man = make_manifest("spectral", argv);
    man.model = spec.source;
    man.parameters = {{"observable", a.observable}, {"N", a.N}, {"s_grid", a.s_grid}};
    if (!a.poisson_out.empty()) {
        const auto G = poisson_solve_explicit(gen, g);
        std::ofstream f(a.poisson_out);
        if (!f) throw UsageError("cannot write " + a.poisson_out);
        f << "n,mu,g,G\n";
        for (long n = 0; n <= a.N; ++n)
            f << n << ',' << format_number(gen.measure.weights[n]) << ',' << format_number(g.values[n]) << ','
              << format_number(G.values[n]) << '\n';
        std::ofstream(a.poisson_out + ".manifest.json") << man.to_json().dump(2) << '\n';
    }
    emit(a.out, a.format == "json" ? "json" : "txt", os.str(), man);
    return kOk;
}

int run(const std::vector<std::string>& args);

int cmd_replay(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open manifest " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SpecError("manifest " + path + ": " + e.what());
    }
    const auto man = RunManifest::from_json(j);
    if (man.argv.empty() || man.argv.front() == "replay") throw SpecError("manifest: nothing to replay");
    return run(man.argv);
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Bernstein tail bounds for Markov processes"};
    app.require_subcommand(1);

    BoundArgs ba;
    auto* bound = app.add_subcommand("bound", "rate alpha, its inverse and tail envelopes over a grid");
    bound->add_option("--sigma2", ba.sigma2, "asymptotic variance")->required();
    bound->add_option("--m", ba.m, "M constant")->required();
    bound->add_option("--prefactor", ba.prefactor, "||d beta/d mu||_2 (1 for stationary starts)");
    bound->add_option("--t-grid", ba.t_grid, "comma-separated t values")->delimiter(',');
    bound->add_option("--r-grid", ba.r_grid, "comma-separated r values")->delimiter(',')->required();
    bound->add_option("--format", ba.format)->check(CLI::IsMember({"table", "csv", "json"}));
    bound->add_option("--out", ba.out, "output prefix; writes the data file and a manifest");

    ConstantsArgs ca;
    auto* constants = app.add_subcommand("constants", "M ledger for a model and observable");
    constants->add_option("--model", ca.model, "model spec (JSON)")->required();
    constants->add_option("--observable", ca.observable);
    constants->add_option("--inputs", ca.inputs, "name=value pairs: c_p c_ls c_g c_p_phi kappa_c ...");
    constants->add_option("--format", ca.format)->check(CLI::IsMember({"table", "csv", "json"}));
    constants->add_option("--out", ca.out);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Monte Carlo tails against the Bernstein envelope");
    validate->add_option("--model", va.model)->required();
    validate->add_option("--observable", va.observable);
    validate->add_option("--sigma2", va.sigma2);
    validate->add_flag("--auto-sigma2", va.auto_sigma2, "take sigma2 from the ledger");
    validate->add_option("--m", va.m);
    validate->add_option("--route", va.route, "take M from this ledger route");
    validate->add_option("--inputs", va.inputs);
    validate->add_option("--t-grid", va.t_grid)->delimiter(',')->required();
    validate->add_option("--r-grid", va.r_grid)->delimiter(',')->required();
    validate->add_option("--paths", va.paths);
    validate->add_option("--seed", va.seed);
    validate->add_option("--dt", va.dt);
    validate->add_option("--threads", va.threads, "0: BERNSTEIN_THREADS or hardware concurrency");
    validate->add_option("--method", va.method);
    validate->add_option("--format", va.format)->check(CLI::IsMember({"csv", "json"}));
    validate->add_option("--out", va.out);

    SpectralArgs sa;
    auto* spectral = app.add_subcommand("spectral", "gap, Lambda(s g), sigma2 and the Poisson solution");
    spectral->add_option("--model", sa.model)->required();
    spectral->add_option("--observable", sa.observable);
    spectral->add_option("--N", sa.N, "truncation level");
    spectral->add_option("--s-grid", sa.s_grid)->delimiter(',');
    spectral->add_option("--poisson-out", sa.poisson_out, "CSV dump of n, mu, g, G");
    spectral->add_option("--format", sa.format)->check(CLI::IsMember({"table", "json"}));
    spectral->add_option("--out", sa.out);

    std::string manifest_path;
    auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    replay->add_option("manifest", manifest_path)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (*bound) return cmd_bound(ba, args);
    if (*constants) return cmd_constants(ca, args);
    if (*validate) return cmd_validate(va, args);
    if (*spectral) return cmd_spectral(sa, args);
    return cmd_replay(manifest_path);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run(args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::invalid_argument& e) {  // SpecError, CapabilityError
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumeric;
    }
}
