#pragma once

// Path simulation of time averages L_t(g) = (1/t)∫₀ᵗ g(X_s) ds, Monte Carlo
// tail estimates with binomial confidence intervals, and their comparison
// with the Bernstein envelopes.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bernstein/bound_algebra.hpp"
#include "bernstein/chain_models.hpp"
#include "bernstein/diffusion_models.hpp"
#include "bernstein/random.hpp"

namespace bernstein {

enum class InitialLaw { stationary, fixed_state };

struct TrajectoryConfig {
    double t_max = 1.0;
    double dt = 0.01;  // diffusions only
    std::uint64_t seed = 0;
    InitialLaw initial = InitialLaw::stationary;
    double fixed_state = 0.0;
    long state_cap = 10'000'000;  // chains: runaway guard
};

/// Birth-death chain with a truncated invariant measure used to draw X_0.
struct ChainModel {
    BirthDeathSpec spec;
    StationaryMeasure measure;
    std::vector<double> cdf;

    ChainModel(BirthDeathSpec spec_, double tail_epsilon = 1e-12, long max_n = 1'000'000);
    long sample_stationary(RandomStream& rng) const;
};

struct OUModel {
    OUSpec spec;
};

/// Potential diffusion; stationary starts are drawn from a tabulated inverse
/// CDF of e^{−V} (dimension 1 only).
struct DiffusionModel {
    PotentialDiffusion diff;
    std::vector<double> grid;
    std::vector<double> cdf;

    explicit DiffusionModel(PotentialDiffusion d, double half_width = 50.0, int cells = 200'000);
    double sample_stationary(RandomStream& rng) const;
};

using Model = std::variant<ChainModel, OUModel, DiffusionModel>;

std::string model_name(const Model& m);

/// Observable evaluated along paths. Chains and one-dimensional diffusions use
/// `scalar` (the chain state is passed as a double); `vector` serves d > 1.
struct PathObservable {
    std::string name;
    std::function<double(double)> scalar;
    std::function<double(const Eigen::VectorXd&)> vector;
};

struct ChainEvent {
    double time;
    long state;
};

/// Jump times and states of one chain path on [0, t]; the first event is (0, X_0).
std::vector<ChainEvent> simulate_bd_path(const ChainModel& model, const TrajectoryConfig& config, RandomStream& rng);

/// (1/t)∫₀ᵗ g(X_s) ds from an event log, exact for piecewise-constant paths.
double time_average_from_log(const std::vector<ChainEvent>& log, const PathObservable& g, double t);

/// L_t(g) for one chain path, accumulated on the fly (no event log).
double simulate_bd_time_average(const ChainModel& model, const PathObservable& g, const TrajectoryConfig& config,
                                RandomStream& rng);

/// Convenience: the stream is derived from (config.seed, path_index 0).
double simulate_bd_time_average(const ChainModel& model, const PathObservable& g, const TrajectoryConfig& config);

/// L_t(g) on an OU or potential-diffusion path sampled every dt, trapezoid in time.
double simulate_diffusion_time_average(const Model& model, const PathObservable& g, const TrajectoryConfig& config,
                                       RandomStream& rng);
double simulate_diffusion_time_average(const Model& model, const PathObservable& g, const TrajectoryConfig& config);

/// One L_t(g) per path, path i using stream (seed, i). Work is split across
/// `threads` workers (0: BERNSTEIN_THREADS or hardware concurrency); results
/// are identical for every thread count.
std::vector<double> simulate_time_averages(const Model& model, const PathObservable& g,
                                           const TrajectoryConfig& config, long n_paths, unsigned threads = 0);

enum class IntervalMethod { wilson, clopper_pearson };

std::string to_string(IntervalMethod m);

struct TailEstimate {
    double p_hat = 0.0;
    long n_paths = 0;
    long successes = 0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    IntervalMethod method = IntervalMethod::wilson;
    bool one_sided = false;  // zero successes: one-sided upper bound at the same level
};

/// 95% interval for k successes out of n.
TailEstimate binomial_interval(long successes, long n, IntervalMethod method, double confidence = 0.95);

/// Fraction of values strictly above r, with its interval.
TailEstimate tail_from_samples(const std::vector<double>& values, double r, IntervalMethod method);

TailEstimate mc_tail_estimate(const Model& model, const PathObservable& g, double t, double r, long n_paths,
                              std::uint64_t seed, InitialLaw initial = InitialLaw::stationary,
                              IntervalMethod method = IntervalMethod::wilson, double dt = 0.01);

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

/// pass ⇔ ci_high ≤ bound; fail ⇔ ci_low > bound.
Verdict verdict_for(const TailEstimate& est, double bound);

struct TailRow {
    double t = 0.0;
    double r = 0.0;
    TailEstimate estimate;
    double bound = 1.0;
    std::string bound_route;
    Verdict verdict = Verdict::inconclusive;
};

struct TailReport {
    std::string model;
    std::string observable;
    std::string route;
    BernsteinParamsd params;
    std::vector<TailRow> rows;

    long count(Verdict v) const;
};

struct ValidationConfig {
    std::vector<double> t_grid;
    std::vector<double> r_grid;
    long n_paths = 10'000;
    std::uint64_t seed = 0;
    IntervalMethod method = IntervalMethod::clopper_pearson;
    double dt = 0.01;
    unsigned threads = 0;
};

/// Every (t, r) cell against tail_envelope(params, t, r). One batch of paths
/// per t (sub-seed mix_seed(seed + t_index)); all r share it.
TailReport validate_bound(const Model& model, const PathObservable& g, const BernsteinParamsd& params,
                          const std::string& route, const ValidationConfig& config);

struct LdpRow {
    double t = 0.0;
    TailEstimate estimate;
    double rate = 0.0;  // −(1/t) log p̂
    double rate_low = 0.0;
    double rate_high = 0.0;
    bool dropped = false;  // p̂ = 0
};

struct LdpReport {
    double r = 0.0;
    std::optional<double> analytic_limit;
    std::vector<LdpRow> rows;
    bool nonincreasing_trend = false;
};

LdpReport empirical_ldp_rate(const Model& model, const PathObservable& g, double r, const std::vector<double>& t_grid,
                             long n_paths, std::uint64_t seed, std::optional<double> analytic_limit = std::nullopt,
                             unsigned threads = 0);

/// lim (1/t) log P(L_t(g₀) > r) = −r² / (λ(√(1 + r/λ) + 1)²) on the M/M/∞ queue.
double mminf_ldp_limit(double lambda, double r);

}  // namespace bernstein
