#include "bernstein/diffusion_models.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "bernstein/errors.hpp"

namespace bernstein {

OUSpec::OUSpec(double theta_) : theta(theta_) {
    if (!(theta > 0)) throw DomainError("OUSpec: theta must be > 0");
}

double ou_transition_sample(double x, double dt, double theta, RandomStream& rng) {
    if (!(dt > 0)) throw DomainError("ou_transition_sample: dt must be > 0");
    if (!(theta > 0)) throw DomainError("ou_transition_sample: theta must be > 0");
    const double decay = std::exp(-dt / theta);
    const double sd = std::sqrt(theta * -std::expm1(-2.0 * dt / theta));
    std::normal_distribution<double> z;
    return x * decay + sd * z(rng);
}

SpectralConstants ou_constants(double theta) {
    if (!(theta > 0)) throw DomainError("ou_constants: theta must be > 0");
    SpectralConstants c;
    c.c_P = theta;
    c.lambda_1 = 1.0 / theta;
    c.c_LS = theta;
    c.provenance_c_P = "analytic (Ornstein-Uhlenbeck)";
    c.provenance_c_LS = "analytic (Ornstein-Uhlenbeck)";
    return c;
}

double ou_lambda_quadratic(double lambda, double theta) {
    if (!(theta > 0)) throw DomainError("ou_lambda_quadratic: theta must be > 0");
    if (lambda > ou_lambda_pole(theta)) return std::numeric_limits<double>::infinity();
    const double root = std::sqrt(std::max(0.0, 1.0 - 4.0 * theta * theta * lambda));
    const double d = 1.0 - root;
    return d * d / (4.0 * theta);
}

double ou_eigen_residual(double a, double theta, std::span<const double> grid) {
    if (!(a < 0.5)) throw DomainError("ou_eigen_residual: a must be < 1/2");
    if (!(theta > 0)) throw DomainError("ou_eigen_residual: theta must be > 0");
    const double potential = (a - a * a) / (theta * theta);
    const double eigenvalue = a * a / theta;
    double worst = 0.0;
    for (double x : grid) {
        // U′/U and U″/U for U = exp(a x²/(2θ)).
        const double du = a * x / theta;
        const double d2u = a / theta + du * du;
        const double lu = d2u - x * du / theta;
        const double res = lu + potential * (x * x - theta) - eigenvalue;
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

PotentialDiffusion radial_potential(RadialProfile profile, int dim, std::string name) {
    if (dim < 1) throw DomainError("radial_potential: dimension must be >= 1");
    PotentialDiffusion p;
    p.dim = dim;
    p.builtin = std::move(name);
    p.radial = profile;
    p.V = [profile](const Eigen::VectorXd& x) { return profile.v(x.norm()); };
    p.gradV = [profile](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        const double r = x.norm();
        if (r == 0.0) return Eigen::VectorXd::Zero(x.size());
        return (profile.dv(r) / r) * x;
    };
    p.laplV = [profile, dim](const Eigen::VectorXd& x) {
        const double r = x.norm();
        if (r == 0.0) return dim * profile.d2v(0.0);  // smooth even profile: v′(r)/r → v″(0)
        return profile.d2v(r) + (dim - 1) * profile.dv(r) / r;
    };
    return p;
}

PotentialDiffusion power_potential(double beta, int dim) {
    if (!(beta > 0)) throw DomainError("power_potential: beta must be > 0");
    // Even quartic c0 + c2 r² + c4 r⁴ matching r^β to second order at r = 1.
    const double c4 = beta * (beta - 2.0) / 8.0;
    const double c2 = beta * (4.0 - beta) / 4.0;
    const double c0 = 1.0 - c2 - c4;
    RadialProfile prof;
    prof.v = [=](double r) { return r > 1.0 ? std::pow(r, beta) : c0 + r * r * (c2 + c4 * r * r); };
    prof.dv = [=](double r) {
        return r > 1.0 ? beta * std::pow(r, beta - 1.0) : r * (2.0 * c2 + 4.0 * c4 * r * r);
    };
    prof.d2v = [=](double r) {
        return r > 1.0 ? beta * (beta - 1.0) * std::pow(r, beta - 2.0) : 2.0 * c2 + 12.0 * c4 * r * r;
    };
    auto p = radial_potential(prof, dim, "power");
    p.beta = beta;
    return p;
}

PotentialDiffusion subexponential_potential(double beta, int dim) {
    if (!(beta > 0 && beta < 1)) throw DomainError("subexponential_potential: beta must lie in (0, 1)");
    auto p = power_potential(beta, dim);
    p.builtin = "subexp";
    return p;
}

PotentialDiffusion cauchy_potential(double beta, int dim) {
    if (!(beta > 0)) throw DomainError("cauchy_potential: beta must be > 0");
    const double k = dim + beta;
    RadialProfile prof;
    prof.v = [=](double r) { return 0.5 * k * std::log1p(r * r); };
    prof.dv = [=](double r) { return k * r / (1.0 + r * r); };
    prof.d2v = [=](double r) {
        const double q = 1.0 + r * r;
        return k * (1.0 - r * r) / (q * q);
    };
    auto p = radial_potential(prof, dim, "cauchy");
    p.beta = beta;
    return p;
}

PotentialDiffusion quadratic_potential(double theta, int dim) {
    if (!(theta > 0)) throw DomainError("quadratic_potential: theta must be > 0");
    RadialProfile prof;
    prof.v = [=](double r) { return r * r / (2.0 * theta); };
    prof.dv = [=](double r) { return r / theta; };
    prof.d2v = [=](double) { return 1.0 / theta; };
    auto p = radial_potential(prof, dim, "quadratic");
    p.beta = 2.0;
    return p;
}

Eigen::VectorXd euler_maruyama_step(const Eigen::VectorXd& x, double dt, const PotentialDiffusion& diff,
                                    RandomStream& rng) {
    if (!(dt > 0)) throw DomainError("euler_maruyama_step: dt must be > 0");
    const Eigen::VectorXd grad = diff.gradV(x);
    if (!grad.allFinite()) {
        std::ostringstream os;
        os << "euler_maruyama_step: non-finite gradient at x = " << x.transpose();
        throw IntegrationError(os.str());
    }
    std::normal_distribution<double> z;
    Eigen::VectorXd out = x - grad * dt;
    const double scale = std::sqrt(2.0 * dt);
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += scale * z(rng);
    return out;
}

double half_line_integral(const std::function<double(double)>& f) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f);
}

double radial_expectation(const PotentialDiffusion& diff, const std::function<double(double)>& h) {
    if (!diff.radial) throw CapabilityError("radial_expectation: potential has no radial profile");
    const auto& prof = *diff.radial;
    const int d = diff.dim;
    const double v0 = prof.v(0.0);
    auto density = [&](double r) { return std::pow(r, d - 1) * std::exp(-(prof.v(r) - v0)); };
    const double z = half_line_integral(density);
    const double num = half_line_integral([&](double r) { return h(r) * density(r); });
    return num / z;
}

}  // namespace bernstein
