#include "bernstein/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "bernstein/errors.hpp"

namespace bernstein {

namespace {

template <typename... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <typename... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t sample_from_cdf(const std::vector<double>& cdf, RandomStream& rng) {
    std::uniform_real_distribution<double> u(0.0, cdf.back());
    const double x = u(rng);
    return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
}

unsigned resolve_threads(unsigned threads) {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("BERNSTEIN_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double eval_scalar(const PathObservable& g, double x) {
    if (!g.scalar) throw CapabilityError("observable '" + g.name + "' has no scalar form");
    return g.scalar(x);
}

double chain_initial(const ChainModel& model, const TrajectoryConfig& config, RandomStream& rng) {
    if (config.initial == InitialLaw::stationary) return static_cast<double>(model.sample_stationary(rng));
    if (config.fixed_state < 0 || config.fixed_state != std::floor(config.fixed_state))
        throw DomainError("chain fixed start must be a nonnegative integer state");
    return config.fixed_state;
}

void check_config(const TrajectoryConfig& config) {
    if (!(config.t_max > 0)) throw DomainError("TrajectoryConfig: t_max must be > 0");
    if (!(config.dt > 0)) throw DomainError("TrajectoryConfig: dt must be > 0");
}

// Advances a chain path; calls on_hold(state, duration) for every holding
// interval clipped to [0, t].
template <typename OnHold>
long run_chain(const ChainModel& model, const TrajectoryConfig& config, RandomStream& rng, OnHold&& on_hold) {
    check_config(config);
    long state = static_cast<long>(chain_initial(model, config, rng));
    double time = 0.0;
    std::exponential_distribution<double> hold(1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (true) {
        const double up = model.spec.b(state);
        const double down = state > 0 ? model.spec.a(state) : 0.0;
        const double total = up + down;
        const double dur = hold(rng) / total;
        if (time + dur >= config.t_max) {
            on_hold(state, config.t_max - time, time);
            return state;
        }
        on_hold(state, dur, time);
        time += dur;
        state += (u(rng) * total < up) ? 1 : -1;
        if (state > config.state_cap) {
            std::ostringstream os;
            os << model.spec.name << ": path exceeded the state cap " << config.state_cap;
            throw IntegrationError(os.str());
        }
    }
}

}  // namespace

ChainModel::ChainModel(BirthDeathSpec spec_, double tail_epsilon, long max_n) : spec(std::move(spec_)) {
    measure = invariant_measure(spec, choose_truncation(spec, tail_epsilon, max_n));
    cdf.resize(static_cast<std::size_t>(measure.size()));
    double acc = 0.0;
    for (long n = 0; n < measure.size(); ++n) cdf[static_cast<std::size_t>(n)] = (acc += measure.weights[n]);
}

long ChainModel::sample_stationary(RandomStream& rng) const {
    return std::min<long>(static_cast<long>(sample_from_cdf(cdf, rng)), measure.truncation);
}

DiffusionModel::DiffusionModel(PotentialDiffusion d, double half_width, int cells) : diff(std::move(d)) {
    if (diff.dim != 1) return;  // stationary sampling is tabulated in one dimension only
    grid.resize(static_cast<std::size_t>(cells) + 1);
    cdf.resize(grid.size());
    const double h = 2 * half_width / cells;
    Eigen::VectorXd x(1);
    x[0] = 0.0;
    const double v0 = diff.V(x);
    double acc = 0.0, prev = 0.0;
    for (int i = 0; i <= cells; ++i) {
        x[0] = -half_width + i * h;
        grid[static_cast<std::size_t>(i)] = x[0];
        const double dens = std::exp(-(diff.V(x) - v0));
        if (i > 0) acc += 0.5 * h * (dens + prev);
        prev = dens;
        cdf[static_cast<std::size_t>(i)] = acc;
    }
}

double DiffusionModel::sample_stationary(RandomStream& rng) const {
    if (cdf.empty()) throw CapabilityError("stationary start is tabulated for one-dimensional potentials only");
    std::uniform_real_distribution<double> u(0.0, cdf.back());
    const double target = u(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    const std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), 1, cdf.size() - 1);
    const double span = cdf[i] - cdf[i - 1];
    const double w = span > 0 ? (target - cdf[i - 1]) / span : 0.5;
    return grid[i - 1] + w * (grid[i] - grid[i - 1]);
}

std::string model_name(const Model& m) {
    return std::visit(overloaded{[](const ChainModel& c) { return c.spec.name; },
                                 [](const OUModel&) { return std::string("ou"); },
                                 [](const DiffusionModel& d) { return "potential:" + d.diff.builtin; }},
                      m);
}

std::vector<ChainEvent> simulate_bd_path(const ChainModel& model, const TrajectoryConfig& config, RandomStream& rng) {
    std::vector<ChainEvent> log;
    run_chain(model, config, rng, [&](long state, double, double start) { log.push_back({start, state}); });
    return log;
}

double time_average_from_log(const std::vector<ChainEvent>& log, const PathObservable& g, double t) {
    if (log.empty()) throw DomainError("time_average_from_log: empty log");
    double acc = 0.0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        const double end = i + 1 < log.size() ? log[i + 1].time : t;
        acc += eval_scalar(g, static_cast<double>(log[i].state)) * (end - log[i].time);
    }
    return acc / t;
}

double simulate_bd_time_average(const ChainModel& model, const PathObservable& g, const TrajectoryConfig& config,
                                RandomStream& rng) {
    double acc = 0.0;
    run_chain(model, config, rng,
              [&](long state, double dur, double) { acc += eval_scalar(g, static_cast<double>(state)) * dur; });
    return acc / config.t_max;
}

double simulate_bd_time_average(const ChainModel& model, const PathObservable& g, const TrajectoryConfig& config) {
    RandomStream rng = make_stream(config.seed, 0);
    return simulate_bd_time_average(model, g, config, rng);
}

double simulate_diffusion_time_average(const Model& model, const PathObservable& g, const TrajectoryConfig& config,
                                       RandomStream& rng) {
    check_config(config);
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(config.t_max / config.dt - 1e-9)));
    const double h = config.t_max / static_cast<double>(steps);

    return std::visit(
        overloaded{
            [&](const OUModel& ou) {
                const double theta = ou.spec.theta;
                std::normal_distribution<double> z;
                double x = config.initial == InitialLaw::stationary ? std::sqrt(theta) * z(rng) : config.fixed_state;
                const double decay = std::exp(-h / theta);
                const double sd = std::sqrt(theta * -std::expm1(-2.0 * h / theta));
                double acc = 0.5 * eval_scalar(g, x);
                for (long i = 1; i <= steps; ++i) {
                    x = x * decay + sd * z(rng);
                    acc += (i == steps ? 0.5 : 1.0) * eval_scalar(g, x);
                }
                return acc * h / config.t_max;
            },
            [&](const DiffusionModel& dm) {
                const int d = dm.diff.dim;
                Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
                if (config.initial == InitialLaw::stationary)
                    x[0] = dm.sample_stationary(rng);
                else
                    x.setConstant(config.fixed_state);
                auto value = [&](const Eigen::VectorXd& p) { return d == 1 && g.scalar ? g.scalar(p[0]) : g.vector(p); };
                if (d > 1 && !g.vector) throw CapabilityError("observable '" + g.name + "' has no vector form");
                double acc = 0.5 * value(x);
                for (long i = 1; i <= steps; ++i) {
                    x = euler_maruyama_step(x, h, dm.diff, rng);
                    acc += (i == steps ? 0.5 : 1.0) * value(x);
                }
                return acc * h / config.t_max;
            },
            [&](const ChainModel&) -> double {
                throw DomainError("simulate_diffusion_time_average: model is a chain");
            }},
        model);
}

double simulate_diffusion_time_average(const Model& model, const PathObservable& g, const TrajectoryConfig& config) {
    RandomStream rng = make_stream(config.seed, 0);
    return simulate_diffusion_time_average(model, g, config, rng);
}

std::vector<double> simulate_time_averages(const Model& model, const PathObservable& g,
                                           const TrajectoryConfig& config, long n_paths, unsigned threads) {
    if (n_paths < 1) throw DomainError("simulate_time_averages: n_paths must be >= 1");
    check_config(config);
    std::vector<double> out(static_cast<std::size_t>(n_paths));
    auto one = [&](long i) {
        RandomStream rng = make_stream(config.seed, static_cast<std::uint64_t>(i));
        if (const auto* chain = std::get_if<ChainModel>(&model)) return simulate_bd_time_average(*chain, g, config, rng);
        return simulate_diffusion_time_average(model, g, config, rng);
    };
    const unsigned workers = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(n_paths));
    if (workers <= 1) {
        for (long i = 0; i < n_paths; ++i) out[static_cast<std::size_t>(i)] = one(i);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (long i = w; i < n_paths; i += workers) out[static_cast<std::size_t>(i)] = one(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::string to_string(IntervalMethod m) { return m == IntervalMethod::wilson ? "wilson" : "clopper_pearson"; }

TailEstimate binomial_interval(long k, long n, IntervalMethod method, double confidence) {
    if (n < 1 || k < 0 || k > n) throw DomainError("binomial_interval: need 0 <= k <= n, n >= 1");
    const double alpha = 1.0 - confidence;
    TailEstimate e;
    e.n_paths = n;
    e.successes = k;
    e.method = method;
    e.p_hat = static_cast<double>(k) / static_cast<double>(n);
    const double nn = static_cast<double>(n);
    const boost::math::normal_distribution<double> std_normal;

    if (k == 0) {
        e.one_sided = true;
        e.ci_low = 0.0;
        if (method == IntervalMethod::clopper_pearson) {
            e.ci_high = -std::expm1(std::log(alpha) / nn);
        } else {
            const double z = boost::math::quantile(std_normal, 1.0 - alpha);
            e.ci_high = z * z / (nn + z * z);
        }
        return e;
    }

    if (method == IntervalMethod::clopper_pearson) {
        e.ci_low = boost::math::ibeta_inv(static_cast<double>(k), static_cast<double>(n - k + 1), alpha / 2);
        e.ci_high = k == n ? 1.0
                           : boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k),
                                                    1.0 - alpha / 2);
    } else {
        const double z = boost::math::quantile(std_normal, 1.0 - alpha / 2);
        const double p = e.p_hat;
        const double denom = 1.0 + z * z / nn;
        const double center = (p + z * z / (2 * nn)) / denom;
        const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
        e.ci_low = std::max(0.0, center - half);
        e.ci_high = std::min(1.0, center + half);
    }
    e.ci_low = std::min(e.ci_low, e.p_hat);
    e.ci_high = std::max(e.ci_high, e.p_hat);
    return e;
}

TailEstimate tail_from_samples(const std::vector<double>& values, double r, IntervalMethod method) {
    const long k = std::count_if(values.begin(), values.end(), [r](double v) { return v > r; });
    return binomial_interval(k, static_cast<long>(values.size()), method);
}

TailEstimate mc_tail_estimate(const Model& model, const PathObservable& g, double t, double r, long n_paths,
                              std::uint64_t seed, InitialLaw initial, IntervalMethod method, double dt) {
    if (n_paths < 100) throw DomainError("mc_tail_estimate: n_paths must be >= 100");
    TrajectoryConfig cfg;
    cfg.t_max = t;
    cfg.dt = dt;
    cfg.seed = seed;
    cfg.initial = initial;
    return tail_from_samples(simulate_time_averages(model, g, cfg, n_paths), r, method);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict verdict_for(const TailEstimate& est, double bound) {
    if (est.ci_high <= bound) return Verdict::pass;
    if (est.ci_low > bound) return Verdict::fail;
    return Verdict::inconclusive;
}

long TailReport::count(Verdict v) const {
    return std::count_if(rows.begin(), rows.end(), [v](const TailRow& r) { return r.verdict == v; });
}

TailReport validate_bound(const Model& model, const PathObservable& g, const BernsteinParamsd& params,
                          const std::string& route, const ValidationConfig& config) {
    if (config.n_paths < 100) throw DomainError("validate_bound: n_paths must be >= 100");
    TailReport rep;
    rep.model = model_name(model);
    rep.observable = g.name;
    rep.route = route;
    rep.params = params;
    for (std::size_t ti = 0; ti < config.t_grid.size(); ++ti) {
        TrajectoryConfig cfg;
        cfg.t_max = config.t_grid[ti];
        cfg.dt = config.dt;
        cfg.seed = mix_seed(config.seed + ti);
        cfg.initial = InitialLaw::stationary;
        const auto values = simulate_time_averages(model, g, cfg, config.n_paths, config.threads);
        for (double r : config.r_grid) {
            TailRow row;
            row.t = cfg.t_max;
            row.r = r;
            row.estimate = tail_from_samples(values, r, config.method);
            row.bound = tail_envelope(params, row.t, r);
            row.bound_route = route;
            row.verdict = verdict_for(row.estimate, row.bound);
            rep.rows.push_back(row);
        }
    }
    return rep;
}

LdpReport empirical_ldp_rate(const Model& model, const PathObservable& g, double r, const std::vector<double>& t_grid,
                             long n_paths, std::uint64_t seed, std::optional<double> analytic_limit,
                             unsigned threads) {
    LdpReport rep;
    rep.r = r;
    rep.analytic_limit = analytic_limit;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        TrajectoryConfig cfg;
        cfg.t_max = t_grid[ti];
        cfg.seed = mix_seed(seed + ti);
        const auto values = simulate_time_averages(model, g, cfg, n_paths, threads);
        LdpRow row;
        row.t = cfg.t_max;
        row.estimate = tail_from_samples(values, r, IntervalMethod::clopper_pearson);
        row.dropped = row.estimate.successes == 0;
        if (!row.dropped) {
            row.rate = -std::log(row.estimate.p_hat) / row.t;
            row.rate_low = -std::log(row.estimate.ci_high) / row.t;
            row.rate_high = -std::log(row.estimate.ci_low) / row.t;
        }
        rep.rows.push_back(row);
    }
    // Beyond the first row, rates should not climb by more than 5%.
    rep.nonincreasing_trend = true;
    const LdpRow* prev = nullptr;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& row = rep.rows[i];
        if (row.dropped) continue;
        if (prev && i > 1 && row.rate > prev->rate * 1.05) rep.nonincreasing_trend = false;
        prev = &row;
    }
    return rep;
}

double mminf_ldp_limit(double lambda, double r) {
    if (!(lambda > 0) || !(r > 0)) throw DomainError("mminf_ldp_limit: need lambda > 0, r > 0");
    const double s = std::sqrt(1.0 + r / lambda) + 1.0;
    return r * r / (lambda * s * s);
}

}  // namespace bernstein
