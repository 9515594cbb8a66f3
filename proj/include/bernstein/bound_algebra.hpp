#pragma once

// Bernstein rate function, its inverse, Laplace envelope, one-dimensional
// Legendre duality and the tail envelopes built from them.
//
//   Laplace envelope   Λ(λ) ≤ λ²σ² / (2(1 − λM)),      λ ∈ [0, 1/M)
//   rate               α(r) = 2r² / (σ²(√(1 + 2Mr/σ²) + 1)²)
//   inverse            α⁻¹(x) = σ√(2x) + Mx
//   tail envelope      P(L_t > r) ≤ prefactor · exp(−t α(r))
//   classic envelope   P(L_t > r) ≤ prefactor · exp(−t r² / (2(σ² + Mr)))
//
// α is the Legendre dual of the Laplace envelope, so the two are checked
// against each other numerically through legendre_dual().

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bernstein/errors.hpp"

namespace bernstein {

template <typename Scalar>
struct BernsteinParams {
    Scalar sigma2{0};
    Scalar m_const{0};
    Scalar prefactor{1};

    BernsteinParams() = default;
    BernsteinParams(Scalar sigma2_, Scalar m_const_, Scalar prefactor_ = Scalar(1))
        : sigma2(sigma2_), m_const(m_const_), prefactor(prefactor_) {
        if (!(sigma2 >= 0)) throw DomainError("BernsteinParams: sigma2 must be >= 0");
        if (!(m_const >= 0)) throw DomainError("BernsteinParams: M must be >= 0");
        if (!(prefactor >= 1)) throw DomainError("BernsteinParams: prefactor must be >= 1");
    }

    bool degenerate() const { return sigma2 == 0 && m_const == 0; }
};

using BernsteinParamsd = BernsteinParams<double>;

namespace detail {

template <typename Scalar>
void require_nondegenerate(const BernsteinParams<Scalar>& p, const char* op) {
    if (p.degenerate())
        throw DegenerateObservable(std::string(op) + ": sigma2 = 0 and M = 0 (zero observable)");
}

}  // namespace detail

/// Exponent per unit time of the sharp Bernstein bound.
///
/// Evaluated as 2r² / (√(σ² + 2Mr) + σ)², which is algebraically identical to
/// the usual form and stays finite at σ² = 0, where it reduces to r/M.
template <typename Scalar>
Scalar rate_alpha(const BernsteinParams<Scalar>& p, Scalar r) {
    using std::sqrt;
    if (!(r >= 0)) throw DomainError("rate_alpha: r must be >= 0");
    detail::require_nondegenerate(p, "rate_alpha");
    if (r == 0) return Scalar(0);
    const Scalar sigma = sqrt(p.sigma2);
    const Scalar denom = sqrt(p.sigma2 + 2 * p.m_const * r) + sigma;
    return 2 * r * r / (denom * denom);
}

template <typename Scalar>
Scalar rate_alpha_inv(const BernsteinParams<Scalar>& p, Scalar x) {
    using std::sqrt;
    if (!(x >= 0)) throw DomainError("rate_alpha_inv: x must be >= 0");
    return sqrt(2 * p.sigma2 * x) + p.m_const * x;
}

/// prefactor · exp(−t α(r)) without the clamp to 1; useful for rate studies.
template <typename Scalar>
Scalar tail_envelope_unclamped(const BernsteinParams<Scalar>& p, Scalar t, Scalar r) {
    using std::exp;
    if (!(t > 0)) throw DomainError("tail_envelope: t must be > 0");
    if (!(r > 0)) throw DomainError("tail_envelope: r must be > 0");
    return p.prefactor * exp(-t * rate_alpha(p, r));
}

template <typename Scalar>
Scalar tail_envelope(const BernsteinParams<Scalar>& p, Scalar t, Scalar r) {
    return std::min<Scalar>(Scalar(1), tail_envelope_unclamped(p, t, r));
}

template <typename Scalar>
Scalar tail_envelope_classic_unclamped(const BernsteinParams<Scalar>& p, Scalar t, Scalar r) {
    using std::exp;
    if (!(t > 0)) throw DomainError("tail_envelope_classic: t must be > 0");
    if (!(r > 0)) throw DomainError("tail_envelope_classic: r must be > 0");
    detail::require_nondegenerate(p, "tail_envelope_classic");
    return p.prefactor * exp(-t * r * r / (2 * (p.sigma2 + p.m_const * r)));
}

template <typename Scalar>
Scalar tail_envelope_classic(const BernsteinParams<Scalar>& p, Scalar t, Scalar r) {
    return std::min<Scalar>(Scalar(1), tail_envelope_classic_unclamped(p, t, r));
}

/// λ²σ² / (2(1 − λM)); +∞ at and beyond the pole 1/M.
template <typename Scalar>
Scalar laplace_envelope(const BernsteinParams<Scalar>& p, Scalar lambda) {
    if (!(lambda >= 0)) throw DomainError("laplace_envelope: lambda must be >= 0");
    const Scalar gap = 1 - lambda * p.m_const;
    if (gap <= 0) return std::numeric_limits<Scalar>::infinity();
    return lambda * lambda * p.sigma2 / (2 * gap);
}

/// Right end of the domain the Legendre search uses for the Laplace envelope.
template <typename Scalar>
Scalar laplace_envelope_domain(const BernsteinParams<Scalar>& p) {
    if (p.m_const == 0) return std::numeric_limits<Scalar>::infinity();
    return (1 - Scalar(1e-12)) / p.m_const;
}

/// sup_{λ ∈ [0, upper]} (λr − f(λ)) for convex f with f(0) = 0.
///
/// Ternary search on the concave objective. With an infinite upper end the
/// bracket is first doubled until the objective stops increasing; if it never
/// does the supremum is reported as +∞. f may return +∞ (a pole); the
/// objective is then −∞ there and the search moves away from it.
template <typename Scalar, typename F>
Scalar legendre_dual(F&& f, Scalar r, Scalar upper = std::numeric_limits<Scalar>::infinity(),
                     int max_iter = 200) {
    if (!(r >= 0)) throw DomainError("legendre_dual: r must be >= 0");
    if (!(upper > 0)) throw DomainError("legendre_dual: empty domain");
    auto objective = [&](Scalar lam) -> Scalar {
        const Scalar v = f(lam);
        if (std::isinf(v) && v > 0) return -std::numeric_limits<Scalar>::infinity();
        return lam * r - v;
    };

    Scalar lo = 0;
    Scalar hi = upper;
    if (std::isinf(upper)) {
        hi = 1;
        const Scalar cap = std::numeric_limits<Scalar>::max() / 4;
        Scalar prev = objective(hi);
        while (true) {
            if (hi > cap) return std::numeric_limits<Scalar>::infinity();
            const Scalar next = objective(2 * hi);
            if (!(next > prev)) break;
            prev = next;
            hi *= 2;
        }
        hi *= 2;
    }

    for (int it = 0; it < max_iter && hi - lo > std::numeric_limits<Scalar>::epsilon() * (1 + hi); ++it) {
        const Scalar m1 = lo + (hi - lo) / 3;
        const Scalar m2 = hi - (hi - lo) / 3;
        if (objective(m1) < objective(m2))
            lo = m1;
        else
            hi = m2;
    }
    Scalar best = std::max(objective(lo), objective(hi));
    best = std::max(best, objective((lo + hi) / 2));
    best = std::max(best, Scalar(0));  // λ = 0
    if (!std::isinf(upper)) best = std::max(best, objective(upper));
    return best;
}

/// Legendre dual of the Laplace envelope; equals rate_alpha analytically.
template <typename Scalar>
Scalar legendre_dual_of_envelope(const BernsteinParams<Scalar>& p, Scalar r) {
    return legendre_dual([&](Scalar lam) { return laplace_envelope(p, lam); }, r,
                         laplace_envelope_domain(p));
}

}  // namespace bernstein
