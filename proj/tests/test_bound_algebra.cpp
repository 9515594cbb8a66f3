#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bernstein/bound_algebra.hpp"
#include "bernstein/diffusion_models.hpp"
#include "oracles.hpp"

using namespace bernstein;
using doctest::Approx;

namespace {

// Plain textbook form, kept apart from the stable evaluation in the library.
double alpha_textbook(double s2, double m, double r) {
    const double root = std::sqrt(1 + 2 * m * r / s2) + 1;
    return 2 * r * r / (s2 * root * root);
}

}  // namespace

TEST_CASE("rate_alpha: hand-evaluated points") {
    CHECK(rate_alpha(BernsteinParamsd(2, 1), 3.0) == Approx(1.0).epsilon(1e-14));
    CHECK(rate_alpha(BernsteinParamsd(1, 0), 0.7) == Approx(0.7 * 0.7 / 2).epsilon(1e-14));
    CHECK(rate_alpha(BernsteinParamsd(2, 1), 0.0) == 0.0);
    CHECK(rate_alpha(BernsteinParamsd(2, 1), 0.5) == Approx(0.25 / std::pow(std::sqrt(1.5) + 1, 2)).epsilon(1e-14));
}

TEST_CASE("rate_alpha: agrees with the textbook form") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> s2(0.1, 10), m(0, 5), r(0, 20);
    for (int i = 0; i < 500; ++i) {
        const double a = s2(rng), b = m(rng), x = r(rng);
        CHECK(rate_alpha(BernsteinParamsd(a, b), x) == Approx(alpha_textbook(a, b, x)).epsilon(1e-12));
    }
}

TEST_CASE("rate_alpha: sigma2 = 0 branch is the linear limit r/M") {
    for (double m : {0.5, 1.0, 4.0})
        for (double r : {0.1, 1.0, 7.0}) {
            CHECK(rate_alpha(BernsteinParamsd(0, m), r) == Approx(r / m).epsilon(1e-14));
            CHECK(rate_alpha(BernsteinParamsd(1e-12, m), r) == Approx(r / m).epsilon(1e-5));
        }
}

TEST_CASE("rate_alpha: errors") {
    CHECK_THROWS_AS(rate_alpha(BernsteinParamsd(1, 1), -0.1), DomainError);
    CHECK_THROWS_AS(rate_alpha(BernsteinParamsd(0, 0), 1.0), DegenerateObservable);
    CHECK_THROWS_AS(BernsteinParamsd(-1, 0), DomainError);
    CHECK_THROWS_AS(BernsteinParamsd(1, -1), DomainError);
    CHECK_THROWS_AS(BernsteinParamsd(1, 1, 0.5), DomainError);
}

TEST_CASE("rate_alpha_inv") {
    const BernsteinParamsd p(2, 1);
    CHECK(rate_alpha_inv(p, 0.0) == 0.0);
    CHECK(rate_alpha_inv(p, 1.0) == Approx(3.0).epsilon(1e-15));
    CHECK(rate_alpha_inv(p, 2.0) == Approx(4.82842712474619).epsilon(1e-13));
    CHECK_THROWS_AS(rate_alpha_inv(p, -1.0), DomainError);
}

TEST_CASE("alpha composed with its inverse is the identity") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> s2(0.01, 10), m(0, 5), lx(-6, 4);
    for (int i = 0; i < 1000; ++i) {
        const BernsteinParamsd p(s2(rng), m(rng));
        const double x = std::pow(10.0, lx(rng));
        CHECK(rate_alpha(p, rate_alpha_inv(p, x)) == Approx(x).epsilon(1e-10));
    }
}

TEST_CASE("rate_alpha is convex and nondecreasing on a grid") {
    for (auto p : {BernsteinParamsd(2, 1), BernsteinParamsd(0.1, 5), BernsteinParamsd(3, 0), BernsteinParamsd(0, 2)}) {
        const double h = 0.01;
        for (int i = 1; i < 1000; ++i) {
            const double r = i * h;
            const double a0 = rate_alpha(p, r - h), a1 = rate_alpha(p, r), a2 = rate_alpha(p, r + h);
            CHECK(a1 >= a0);
            CHECK(a2 - 2 * a1 + a0 >= -1e-12);
        }
    }
}

TEST_CASE("tail envelopes") {
    const BernsteinParamsd p(2, 1);
    CHECK(tail_envelope(p, 10.0, 3.0) == Approx(std::exp(-10.0)).epsilon(1e-13));
    CHECK(tail_envelope(BernsteinParamsd(2, 1, 2), 1.0, 3.0) == Approx(2 * std::exp(-1.0)).epsilon(1e-13));
    CHECK(tail_envelope(BernsteinParamsd(2, 1, 2), 1e-9, 3.0) == 1.0);
    CHECK(tail_envelope_unclamped(BernsteinParamsd(2, 1, 2), 1e-9, 3.0) > 1.0);
    CHECK(tail_envelope_classic(p, 10.0, 3.0) == Approx(std::exp(-9.0)).epsilon(1e-13));
    CHECK_THROWS_AS(tail_envelope(p, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(tail_envelope(p, 1.0, 0.0), DomainError);

    // M = 0: the two forms coincide.
    const BernsteinParamsd g(1.5, 0);
    for (double r : {0.1, 0.5, 2.0}) CHECK(tail_envelope(g, 3.0, r) == Approx(tail_envelope_classic(g, 3.0, r)).epsilon(1e-14));
}

TEST_CASE("sharp exponent dominates the classic one") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> s2(0.01, 10), m(0, 5);
    for (int i = 0; i < 200; ++i) {
        const BernsteinParamsd p(s2(rng), m(rng));
        for (double r = 0.05; r < 50; r *= 1.3) {
            CHECK(rate_alpha(p, r) >= r * r / (2 * (p.sigma2 + p.m_const * r)) * (1 - 1e-14));
            CHECK(tail_envelope(p, 2.0, r) <= tail_envelope_classic(p, 2.0, r));
        }
    }
}

TEST_CASE("tail envelope monotonicity") {
    const BernsteinParamsd p(2, 1);
    CHECK(tail_envelope(p, 5.0, 1.0) > tail_envelope(p, 6.0, 1.0));
    CHECK(tail_envelope(p, 5.0, 1.0) > tail_envelope(p, 5.0, 1.1));
    CHECK(tail_envelope(BernsteinParamsd(2.5, 1), 5.0, 1.0) > tail_envelope(p, 5.0, 1.0));
    CHECK(tail_envelope(BernsteinParamsd(2, 1.5), 5.0, 1.0) > tail_envelope(p, 5.0, 1.0));
    CHECK(tail_envelope(BernsteinParamsd(2, 1, 1.5), 5.0, 1.0) > tail_envelope(p, 5.0, 1.0));
}

TEST_CASE("laplace envelope") {
    const BernsteinParamsd p(2, 1);
    CHECK(laplace_envelope(p, 0.0) == 0.0);
    CHECK(laplace_envelope(p, 0.5) == Approx(0.5).epsilon(1e-15));
    CHECK(std::isinf(laplace_envelope(p, 1.0)));
    CHECK(laplace_envelope(p, 1 - 1e-9) > 1e8);
    CHECK(laplace_envelope(BernsteinParamsd(3, 0), 2.0) == Approx(6.0));
    CHECK_THROWS_AS(laplace_envelope(p, -1.0), DomainError);
}

TEST_CASE("legendre dual: spec points") {
    CHECK(legendre_dual_of_envelope(BernsteinParamsd(2, 1), 3.0) == Approx(1.0).epsilon(1e-9));
    for (double r : {0.0, 0.3, 1.0, 4.0})
        CHECK(legendre_dual([](double l) { return l * l / 2; }, r) == Approx(r * r / 2).epsilon(1e-9));
    // An objective that is unbounded above.
    CHECK(std::isinf(legendre_dual([](double l) { return std::sqrt(l); }, 1.0)));
}

TEST_CASE("legendre dual of the OU Laplace functional against a dense grid") {
    auto f = [](double l) { return ou_lambda_quadratic(l, 1.0); };
    for (double r : {0.1, 0.5, 1.0, 3.0}) {
        const double grid = oracle::legendre_grid(f, r, 0.0, 0.25, 2'000'000);
        CHECK(legendre_dual(f, r, 0.25) == Approx(grid).epsilon(1e-6));
    }
}

TEST_CASE("legendre dual of the Laplace envelope recovers alpha") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> s2(0.1, 10), m(0, 5), r(0.01, 20);
    for (int i = 0; i < 300; ++i) {
        const BernsteinParamsd p(s2(rng), m(rng));
        const double x = r(rng);
        CHECK(legendre_dual_of_envelope(p, x) == Approx(rate_alpha(p, x)).epsilon(1e-6));
    }
}

TEST_CASE("templated scalar: long double agrees with double") {
    const BernsteinParams<long double> pl(2.0L, 1.0L);
    CHECK(static_cast<double>(rate_alpha(pl, 3.0L)) == Approx(1.0).epsilon(1e-15));
}
