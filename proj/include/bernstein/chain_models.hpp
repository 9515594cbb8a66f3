#pragma once

// Birth-death chains on ℕ:
//   L f(k) = b_k (f(k+1) − f(k)) + a_k (f(k−1) − f(k)),   reflecting at 0.
// The reversible invariant measure is π_0 = 1, π_n = b_0⋯b_{n−1} / (a_1⋯a_n).

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bernstein {

struct BirthDeathSpec {
    std::string name;
    std::function<double(long)> birth;  // b_k, k >= 0
    std::function<double(long)> death;  // a_k, k >= 1
    std::map<std::string, double> known_params;

    // Checked accessors; throw SpecError on a nonpositive or non-finite rate.
    double b(long k) const;
    double a(long k) const;
};

/// M/M/∞ queue: b_k = λ, a_k = k. Invariant law Poisson(λ).
BirthDeathSpec mm_infinity(double lambda);

/// b_n = 1, a_n = 1 + a/(n+1). π_n decays like n^{−a}; positive recurrent iff a > 1.
BirthDeathSpec harmonic_death_chain(double a);

/// Tabulated rates. birth = (b_0, b_1, ...), death = (a_1, a_2, ...); the last
/// entry of each table is held constant beyond its end.
BirthDeathSpec table_chain(std::vector<double> birth, std::vector<double> death);

struct StationaryMeasure {
    Eigen::VectorXd weights;  // μ_0..μ_N
    Eigen::VectorXd log_raw;  // log π_0..log π_N
    double log_normalizer = 0.0;
    long truncation = 0;
    double tail_mass_bound = 0.0;
    bool tail_bound_reliable = false;

    long size() const { return truncation + 1; }
    Eigen::VectorXd raw() const { return log_raw.array().exp(); }
    double normalizer() const { return std::exp(log_normalizer); }
    double log_weight(long n) const { return log_raw[n] - log_normalizer; }
    double expectation(const Eigen::VectorXd& f) const { return weights.dot(f); }
};

StationaryMeasure invariant_measure(const BirthDeathSpec& spec, long N);

/// Smallest N whose reported tail-mass bound is below epsilon. Geometric
/// search followed by bisection; TruncationError once max_n is exceeded.
long choose_truncation(const BirthDeathSpec& spec, double epsilon, long max_n = 1'000'000);

struct Observable {
    Eigen::VectorXd values;
    std::optional<double> mean_under;
    bool centered = false;

    static Observable from_function(const std::function<double(long)>& g, long N);
    long size() const { return values.size(); }
};

Observable center_observable(const Observable& g, const StationaryMeasure& mu);

enum class RecurrenceVerdict { likely_positive_recurrent, likely_not, inconclusive };

std::string to_string(RecurrenceVerdict v);

struct RecurrenceCheckpoint {
    long n;
    double log_partial_mass;    // log Σ_{k≤n} π_k
    double log_recurrence_sum;  // log Σ_{k≤n} π_k Σ_{k≤i≤n} (π_i b_i)^{−1}
};

/// Finite-probe evidence about Σ π_n < ∞ and the divergence of the recurrence
/// series. Heuristic only: both criteria are statements about infinite sums.
struct RecurrenceReport {
    std::vector<RecurrenceCheckpoint> checkpoints;
    double tail_log_slope = 0.0;  // fitted d log π_n / d log n over [N/4, N]
    RecurrenceVerdict verdict = RecurrenceVerdict::inconclusive;
    std::string note;
};

RecurrenceReport recurrence_diagnostic(const BirthDeathSpec& spec, long N_probe);

}  // namespace bernstein
