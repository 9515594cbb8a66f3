#include "bernstein/orlicz.hpp"

#include <cmath>
#include <limits>

#include "bernstein/bound_algebra.hpp"
#include "bernstein/errors.hpp"

namespace bernstein {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

OrliczSpec young_linear() {
    return {"linear", [](double x) { return x; }, [](double y) { return y <= 1.0 ? 0.0 : inf; }};
}

OrliczSpec young_quadratic() {
    return {"quadratic", [](double x) { return x * x; }, [](double y) { return y * y / 4.0; }};
}

OrliczSpec young_exponential() {
    return {"exponential", [](double x) { return std::expm1(x); },
            [](double y) { return y <= 1.0 ? 0.0 : y * std::log(y) - y + 1.0; }};
}

OrliczSpec tilde(const OrliczSpec& spec) {
    auto phi = spec.Phi;
    OrliczSpec out;
    out.name = spec.name + "~";
    out.Phi = [phi](double x) { return phi(x * x); };
    out.Psi = [phi](double y) { return legendre_dual([&](double x) { return phi(x * x); }, y); };
    return out;
}

OrliczSpec conjugate_side(const OrliczSpec& spec) { return {spec.name + "*", spec.Psi, spec.Phi}; }

double orlicz_gauge_norm(const std::function<double(double)>& young, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& weights) {
    if (g.size() != weights.size()) throw DomainError("orlicz_gauge_norm: size mismatch");
    const double top = g.cwiseAbs().maxCoeff();
    if (top == 0.0) return 0.0;
    auto mass = [&](double c) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (weights[i] == 0.0) continue;
            const double v = young(std::abs(g[i]) / c);
            if (!std::isfinite(v)) return inf;
            s += weights[i] * v;
        }
        return s;
    };

    double hi = top;
    int guard = 0;
    while (mass(hi) > 1.0) {
        hi *= 2.0;
        if (++guard > 1000) return inf;
    }
    double lo = hi;
    guard = 0;
    while (mass(lo) <= 1.0) {
        lo /= 2.0;
        if (++guard > 1000) return 0.0;
    }
    // mass(lo) > 1 >= mass(hi)
    for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-13; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (mass(mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace bernstein
