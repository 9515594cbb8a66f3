#include "bernstein/chain_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bernstein/errors.hpp"

namespace bernstein {

namespace {

double checked_rate(double v, const char* which, long k, const std::string& name) {
    if (!(v > 0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << ": " << which << " rate at k=" << k << " is " << v << " (must be finite and > 0)";
        throw SpecError(os.str());
    }
    return v;
}

double log_sum_exp(const Eigen::VectorXd& x, long n) {
    const double m = x.head(n).maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((x.head(n).array() - m).exp().sum());
}

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

Eigen::VectorXd log_pi(const BirthDeathSpec& spec, long N) {
    Eigen::VectorXd lp(N + 1);
    lp[0] = 0.0;
    for (long n = 1; n <= N; ++n) lp[n] = lp[n - 1] + std::log(spec.b(n - 1)) - std::log(spec.a(n));
    if (!lp.allFinite()) throw NumericError(spec.name + ": invariant measure overflow in log space");
    return lp;
}

}  // namespace

double BirthDeathSpec::b(long k) const { return checked_rate(birth(k), "birth", k, name); }

double BirthDeathSpec::a(long k) const { return checked_rate(death(k), "death", k, name); }

BirthDeathSpec mm_infinity(double lambda) {
    if (!(lambda > 0)) throw SpecError("mm_infinity: lambda must be > 0");
    BirthDeathSpec s;
    s.name = "mm_infinity";
    s.birth = [lambda](long) { return lambda; };
    s.death = [](long k) { return static_cast<double>(k); };
    s.known_params = {{"lambda", lambda}};
    return s;
}

BirthDeathSpec harmonic_death_chain(double a) {
    if (!(a > 0)) throw SpecError("harmonic_death_chain: a must be > 0");
    BirthDeathSpec s;
    s.name = "harmonic_death";
    s.birth = [](long) { return 1.0; };
    s.death = [a](long n) { return 1.0 + a / static_cast<double>(n + 1); };
    s.known_params = {{"a", a}};
    return s;
}

BirthDeathSpec table_chain(std::vector<double> birth, std::vector<double> death) {
    if (birth.empty() || death.empty()) throw SpecError("table_chain: empty rate table");
    for (double v : birth)
        if (!(v > 0)) throw SpecError("table_chain: birth rates must be > 0");
    for (double v : death)
        if (!(v > 0)) throw SpecError("table_chain: death rates must be > 0");
    BirthDeathSpec s;
    s.name = "table";
    s.birth = [b = std::move(birth)](long k) {
        return b[static_cast<size_t>(std::min<long>(k, static_cast<long>(b.size()) - 1))];
    };
    s.death = [d = std::move(death)](long k) {
        return d[static_cast<size_t>(std::min<long>(k - 1, static_cast<long>(d.size()) - 1))];
    };
    return s;
}

StationaryMeasure invariant_measure(const BirthDeathSpec& spec, long N) {
    if (N < 1) throw DomainError("invariant_measure: truncation N must be >= 1");
    StationaryMeasure m;
    m.truncation = N;
    m.log_raw = log_pi(spec, N);
    m.log_normalizer = log_sum_exp(m.log_raw, N + 1);
    m.weights = (m.log_raw.array() - m.log_normalizer).exp();

    // Geometric majorant of the mass beyond N; the ratio is probed on [N, 4N+16].
    double q = 0.0;
    for (long k = N; k <= 4 * N + 16; ++k) q = std::max(q, spec.b(k) / spec.a(k + 1));
    if (q < 1.0) {
        m.tail_mass_bound = m.weights[N] * q / (1.0 - q);
        m.tail_bound_reliable = true;
    } else {
        m.tail_mass_bound = 1.0;
        m.tail_bound_reliable = false;
    }
    return m;
}

long choose_truncation(const BirthDeathSpec& spec, double epsilon, long max_n) {
    if (!(epsilon > 0 && epsilon < 1)) throw DomainError("choose_truncation: epsilon must lie in (0, 1)");
    auto ok = [&](long n) {
        const auto m = invariant_measure(spec, n);
        return std::pair{m.tail_bound_reliable && m.tail_mass_bound < epsilon, m.tail_mass_bound};
    };
    long hi = 1;
    double achieved = 1.0;
    while (true) {
        auto [good, mass] = ok(hi);
        achieved = mass;
        if (good) break;
        if (hi >= max_n) {
            std::ostringstream os;
            os << spec.name << ": truncation cap " << max_n << " reached with tail-mass bound " << achieved
               << " (target " << epsilon << ")";
            throw TruncationError(os.str(), hi, achieved);
        }
        hi = std::min(2 * hi, max_n);
    }
    long lo = hi / 2;  // fails (or 0)
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (mid >= 1 && ok(mid).first)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

Observable Observable::from_function(const std::function<double(long)>& g, long N) {
    Observable o;
    o.values.resize(N + 1);
    for (long n = 0; n <= N; ++n) o.values[n] = g(n);
    return o;
}

Observable center_observable(const Observable& g, const StationaryMeasure& mu) {
    if (g.size() != mu.size()) throw DomainError("center_observable: observable and measure sizes differ");
    if (!g.values.allFinite()) throw DomainError("center_observable: observable must be finite");
    Observable out;
    out.values = g.values.array() - mu.expectation(g.values);
    out.mean_under = mu.expectation(out.values);
    out.centered = true;
    return out;
}

std::string to_string(RecurrenceVerdict v) {
    switch (v) {
        case RecurrenceVerdict::likely_positive_recurrent: return "likely-positive-recurrent";
        case RecurrenceVerdict::likely_not: return "likely-not";
        case RecurrenceVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

RecurrenceReport recurrence_diagnostic(const BirthDeathSpec& spec, long N_probe) {
    if (N_probe < 10) throw DomainError("recurrence_diagnostic: N_probe must be >= 10");
    const Eigen::VectorXd lp = log_pi(spec, N_probe);
    const double neg_inf = -std::numeric_limits<double>::infinity();

    std::vector<long> marks;
    for (long n = 10; n < N_probe; n *= 2) marks.push_back(n);
    marks.push_back(N_probe);

    RecurrenceReport rep;
    for (long nc : marks) {
        RecurrenceCheckpoint cp{nc, log_sum_exp(lp, nc + 1), neg_inf};
        double log_w = neg_inf;  // log Σ_{i=k}^{nc} (π_i b_i)^{-1}
        for (long k = nc; k >= 0; --k) {
            log_w = log_add(log_w, -(lp[k] + std::log(spec.b(k))));
            cp.log_recurrence_sum = log_add(cp.log_recurrence_sum, lp[k] + log_w);
        }
        rep.checkpoints.push_back(cp);
    }

    // Least-squares slope of log π_n against log n on the probe's last three quarters.
    const long n0 = std::max<long>(1, N_probe / 4);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long cnt = 0;
    for (long n = n0; n <= N_probe; ++n) {
        const double x = std::log(static_cast<double>(n));
        sx += x;
        sy += lp[n];
        sxx += x * x;
        sxy += x * lp[n];
        ++cnt;
    }
    rep.tail_log_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);

    const auto& last = rep.checkpoints.back();
    const auto& prev = rep.checkpoints[rep.checkpoints.size() - 2];
    const bool recurrence_sum_growing = last.log_recurrence_sum - prev.log_recurrence_sum > std::log(1.2);

    if (rep.tail_log_slope > -0.9) {
        rep.verdict = RecurrenceVerdict::likely_not;
        rep.note = "pi_n decays no faster than n^-0.9 on the probe: total mass appears infinite";
    } else if (rep.tail_log_slope < -1.1) {
        if (recurrence_sum_growing) {
            rep.verdict = RecurrenceVerdict::likely_positive_recurrent;
            rep.note = "pi_n appears summable and the recurrence series keeps growing";
        } else {
            rep.verdict = RecurrenceVerdict::inconclusive;
            rep.note = "pi_n appears summable but the recurrence series stalls (possible explosion)";
        }
    } else {
        rep.verdict = RecurrenceVerdict::inconclusive;
        rep.note = "pi_n tail slope is too close to -1 to decide on a finite probe";
    }
    rep.note += " (heuristic, finite probe)";
    return rep;
}

}  // namespace bernstein
