#pragma once

// Independent reference computations for the tests. None of these call into
// the library; they trade speed for transparency.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Number of eigenvalues of the symmetric tridiagonal (d, e) below x (Sturm count).
inline long sturm_count(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double x) {
    long count = 0;
    double q = d[0] - x;
    if (q < 0) ++count;
    for (long i = 1; i < d.size(); ++i) {
        if (q == 0) q = 1e-300;
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if (q < 0) ++count;
    }
    return count;
}

/// k-th smallest eigenvalue (k = 0 is the smallest) by bisection on the Sturm count.
inline double sturm_eigenvalue(const Eigen::VectorXd& d, const Eigen::VectorXd& e, long k) {
    double radius = 0;
    for (long i = 0; i < d.size(); ++i) {
        double r = std::abs(d[i]);
        if (i > 0) r += std::abs(e[i - 1]);
        if (i + 1 < d.size()) r += std::abs(e[i]);
        radius = std::max(radius, r);
    }
    double lo = -radius - 1, hi = radius + 1;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(d, e, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// sup over a uniform grid of [lo, hi] of λr − f(λ).
inline double legendre_grid(const std::function<double(double)>& f, double r, double lo, double hi, long n) {
    double best = -INFINITY;
    for (long i = 0; i <= n; ++i) {
        const double l = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        const double v = l * r - f(l);
        if (v > best) best = v;
    }
    return best;
}

inline double trapezoid(const std::function<double(double)>& f, double a, double b, long n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.5 * (f(a) + f(b));
    for (long i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
    return s * h;
}

inline double poisson_pmf(double lambda, long n) {
    return std::exp(-lambda + static_cast<double>(n) * std::log(lambda) - std::lgamma(static_cast<double>(n) + 1));
}

/// μ_0..μ_N from the plain product formula (no logs; small N only).
inline Eigen::VectorXd product_measure(const std::function<double(long)>& b, const std::function<double(long)>& a,
                                       long N) {
    Eigen::VectorXd pi(N + 1);
    pi[0] = 1;
    for (long n = 1; n <= N; ++n) pi[n] = pi[n - 1] * b(n - 1) / a(n);
    return pi / pi.sum();
}

/// Dense truncated generator, written out row by row.
inline Eigen::MatrixXd dense_generator(const std::function<double(long)>& b, const std::function<double(long)>& a,
                                       long N) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (long k = 0; k <= N; ++k) {
        if (k < N) {
            L(k, k + 1) = b(k);
            L(k, k) -= b(k);
        }
        if (k > 0) {
            L(k, k - 1) = a(k);
            L(k, k) -= a(k);
        }
    }
    return L;
}

}  // namespace oracle
