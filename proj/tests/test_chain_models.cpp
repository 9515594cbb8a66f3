#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bernstein/chain_models.hpp"
#include "bernstein/errors.hpp"
#include "oracles.hpp"

using namespace bernstein;
using doctest::Approx;

TEST_CASE("M/M/infinity measure is Poisson") {
    for (double lambda : {0.5, 1.0, 3.0}) {
        const auto mu = invariant_measure(mm_infinity(lambda), 60);
        for (long n = 0; n <= 25; ++n) CHECK(mu.weights[n] == Approx(oracle::poisson_pmf(lambda, n)).epsilon(1e-12));
        CHECK(mu.weights.sum() == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("symmetric two-state measure") {
    const auto mu = invariant_measure(table_chain({2.0}, {2.0}), 1);
    CHECK(mu.weights[0] == Approx(0.5));
    CHECK(mu.weights[1] == Approx(0.5));
    CHECK(mu.raw()[1] == Approx(1.0));
}

TEST_CASE("log-space measure matches the plain product formula") {
    const auto spec = table_chain({1.0, 2.0, 0.5, 3.0}, {2.0, 1.0, 4.0, 5.0, 6.0});
    const auto mu = invariant_measure(spec, 12);
    const Eigen::VectorXd ref = oracle::product_measure([&](long k) { return spec.b(k); },
                                                        [&](long k) { return spec.a(k); }, 12);
    for (long n = 0; n <= 12; ++n) CHECK(mu.weights[n] == Approx(ref[n]).epsilon(1e-13));
}

TEST_CASE("detailed balance holds to 1e-12") {
    for (const auto& spec : {mm_infinity(2.0), harmonic_death_chain(2.0), table_chain({1, 3, 2}, {2, 2, 5, 1})}) {
        const auto mu = invariant_measure(spec, 300);
        // Compared in log space: the far weights are below the double range.
        for (long n = 0; n < 300; ++n) {
            const double lhs = mu.log_weight(n + 1) + std::log(spec.a(n + 1));
            const double rhs = mu.log_weight(n) + std::log(spec.b(n));
            CHECK(std::abs(std::expm1(lhs - rhs)) <= 1e-12);
        }
    }
}

TEST_CASE("no underflow at large truncation") {
    const auto mu = invariant_measure(mm_infinity(1.0), 2000);
    CHECK(std::isfinite(mu.log_weight(2000)));
    CHECK(mu.log_weight(2000) < -10000);
    CHECK(mu.weights.sum() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("harmonic-death family: pi_n decays like n^-a") {
    for (double a : {2.0, 1.5, 0.5}) {
        const auto mu = invariant_measure(harmonic_death_chain(a), 1000);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        long cnt = 0;
        for (long n = 100; n <= 1000; ++n) {
            const double x = std::log(static_cast<double>(n));
            const double y = mu.log_raw[n];
            sx += x, sy += y, sxx += x * x, sxy += x * y, ++cnt;
        }
        const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        CHECK(slope == Approx(-a).epsilon(0.01));
    }
}

TEST_CASE("choose_truncation") {
    const auto mm = mm_infinity(1.0);
    const long N = choose_truncation(mm, 1e-12);
    CHECK(N >= 1);
    CHECK(N <= 40);
    // The reported bound really covers the Poisson tail.
    double tail = 0;
    for (long n = N + 1; n < 200; ++n) tail += oracle::poisson_pmf(1.0, n);
    CHECK(tail <= 1e-12);
    CHECK(invariant_measure(mm, N).tail_mass_bound < 1e-12);
    CHECK(invariant_measure(mm, N - 1).tail_mass_bound >= 1e-12);

    const long small = choose_truncation(mm, 0.5);
    CHECK(small >= 1);
    CHECK(small <= 3);

    CHECK_THROWS_AS(choose_truncation(mm, 0.0), DomainError);
    CHECK_THROWS_AS(choose_truncation(mm, 1.0), DomainError);
}

TEST_CASE("choose_truncation on a heavy tail: bound checked against a direct tail sum") {
    const auto spec = harmonic_death_chain(3.0);
    const long N = choose_truncation(spec, 1e-6);
    CHECK(N > 100);
    // Mass beyond N, summed directly on a window 40 times longer.
    const long far = 40 * N;
    const auto big = invariant_measure(spec, far);
    const double tail_direct = big.weights.tail(far - N).sum();
    CHECK(tail_direct < 1e-6);
    CHECK(invariant_measure(spec, N).tail_mass_bound >= tail_direct);
}

TEST_CASE("choose_truncation reports the cap") {
    const auto spec = harmonic_death_chain(1.5);
    try {
        choose_truncation(spec, 1e-6, 4096);
        FAIL("expected a truncation failure");
    } catch (const TruncationError& e) {
        CHECK(e.reached_n() == 4096);
        CHECK(e.achieved_mass() > 1e-6);
        CHECK(std::string(e.what()).find("4096") != std::string::npos);
    }
}

TEST_CASE("center_observable") {
    const auto mu = invariant_measure(mm_infinity(1.5), 80);
    const auto g = center_observable(Observable::from_function([](long n) { return double(n); }, 80), mu);
    CHECK(g.centered);
    for (long n = 0; n < 10; ++n) CHECK(g.values[n] == Approx(n - 1.5).epsilon(1e-12));
    CHECK(std::abs(mu.expectation(g.values)) <= 1e-10);

    const auto mu1 = invariant_measure(mm_infinity(1.0), 80);
    const auto sq = center_observable(Observable::from_function([](long n) { return double(n * n); }, 80), mu1);
    CHECK(sq.values[0] == Approx(-2.0).epsilon(1e-12));
    CHECK(sq.values[3] == Approx(7.0).epsilon(1e-12));

    const auto c = center_observable(Observable::from_function([](long) { return 4.2; }, 80), mu1);
    CHECK(c.values.cwiseAbs().maxCoeff() <= 1e-12);

    // Idempotent.
    const auto again = center_observable(sq, mu1);
    CHECK((again.values - sq.values).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("truncation stability") {
    const auto spec = mm_infinity(2.0);
    const auto a = invariant_measure(spec, 30);
    const auto b = invariant_measure(spec, 60);
    for (long n = 0; n <= 30; ++n) CHECK(std::abs(a.weights[n] - b.weights[n]) <= a.tail_mass_bound + 1e-15);
}

TEST_CASE("recurrence diagnostic") {
    CHECK(recurrence_diagnostic(mm_infinity(1.0), 200).verdict == RecurrenceVerdict::likely_positive_recurrent);
    CHECK(recurrence_diagnostic(harmonic_death_chain(2.0), 20000).verdict ==
          RecurrenceVerdict::likely_positive_recurrent);
    const auto low = recurrence_diagnostic(harmonic_death_chain(0.5), 20000);
    CHECK(low.verdict == RecurrenceVerdict::likely_not);
    CHECK(low.note.find("heuristic") != std::string::npos);
    CHECK(to_string(low.verdict) == "likely-not");
    CHECK_THROWS_AS(recurrence_diagnostic(mm_infinity(1.0), 5), DomainError);
}

TEST_CASE("spec errors") {
    CHECK_THROWS_AS(mm_infinity(0.0), SpecError);
    CHECK_THROWS_AS(harmonic_death_chain(-1.0), SpecError);
    CHECK_THROWS_AS(table_chain({1.0, -1.0}, {1.0}), SpecError);
    BirthDeathSpec bad;
    bad.name = "bad";
    bad.birth = [](long k) { return k < 3 ? 1.0 : 0.0; };
    bad.death = [](long) { return 1.0; };
    CHECK_THROWS_AS(invariant_measure(bad, 10), SpecError);
    CHECK_THROWS_AS(invariant_measure(mm_infinity(1.0), 0), DomainError);
}
