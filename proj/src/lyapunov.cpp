#include "bernstein/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bernstein/errors.hpp"

namespace bernstein {

namespace {

struct RatioScan {
    double min_ratio = std::numeric_limits<double>::infinity();
    double outer_log_slope = 0.0;  // d log(ratio)/d log|x| over the outer decade
    bool trend_available = false;
    long points = 0;
};

// Minimum of lhs/rhs over grid points with |x| >= R, and its outer-decade trend.
RatioScan scan_ratio(const Grid& grid, double R, const std::function<double(const Eigen::VectorXd&)>& lhs,
                     const std::function<double(const Eigen::VectorXd&)>& rhs) {
    RatioScan s;
    double r_max = 0.0;
    for (const auto& x : grid) r_max = std::max(r_max, x.norm());
    std::vector<std::pair<double, double>> outer;
    for (const auto& x : grid) {
        const double r = x.norm();
        if (r < R) continue;
        const double ratio = lhs(x) / rhs(x);
        s.min_ratio = std::min(s.min_ratio, ratio);
        ++s.points;
        if (r >= r_max / 10.0 && ratio > 0) outer.emplace_back(std::log(r), std::log(ratio));
    }
    std::sort(outer.begin(), outer.end());
    if (outer.size() >= 3 && outer.back().first - outer.front().first > 0.5) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [lx, ly] : outer) {
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double n = static_cast<double>(outer.size());
        s.outer_log_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        s.trend_available = true;
    }
    return s;
}

void finish_constant_certificate(LyapunovCertificate& cert, const RatioScan& scan, std::optional<double> c,
                                 const Grid& grid, double R,
                                 const std::function<double(const Eigen::VectorXd&)>& lhs,
                                 const std::function<double(const Eigen::VectorXd&)>& rhs) {
    cert.grid_points = scan.points;
    if (scan.points == 0) {
        cert.pass = false;
        cert.note = "no grid point with |x| >= R";
        return;
    }
    std::ostringstream os;
    if (c) {
        if (!(*c > 0)) throw DomainError("Lyapunov check: c must be > 0");
        double margin = std::numeric_limits<double>::infinity();
        for (const auto& x : grid)
            if (x.norm() >= R) margin = std::min(margin, lhs(x) - *c * rhs(x));
        cert.margin = margin;
        cert.pass = margin >= 0;
        cert.c = cert.pass ? *c : 0.0;
        os << "fixed c = " << *c;
    } else {
        const bool vanishing = scan.trend_available && scan.outer_log_slope < -0.25;
        cert.pass = scan.min_ratio > 0 && !vanishing;
        cert.c = cert.pass ? scan.min_ratio : 0.0;
        cert.margin = cert.pass ? 0.0 : std::min(0.0, scan.min_ratio);
        os << "largest grid-valid c = " << scan.min_ratio;
        if (vanishing) os << "; ratio decays like |x|^" << scan.outer_log_slope << " at the grid edge";
    }
    os << " (grid certificate, " << scan.points << " points)";
    cert.note = os.str();
}

void require_a(double a, const char* op) {
    if (!(a < 1)) throw PreconditionError(std::string(op) + ": a must be < 1");
}

}  // namespace

std::string to_string(LyapunovCondition c) {
    switch (c) {
        case LyapunovCondition::kustr: return "kustr";
        case LyapunovCondition::simpl: return "simpl";
        case LyapunovCondition::kustr2: return "kustr2";
        case LyapunovCondition::bd: return "bd";
        case LyapunovCondition::bd_subgeom: return "bd_subgeom";
    }
    return "?";
}

Grid radial_shell_grid(int dim, double r_min, double r_max, int n_radii) {
    if (dim < 1 || !(r_min > 0) || !(r_max > r_min) || n_radii < 2)
        throw DomainError("radial_shell_grid: need dim >= 1, 0 < r_min < r_max, n_radii >= 2");
    std::vector<Eigen::VectorXd> dirs;
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(dim);
    e1[0] = 1.0;
    dirs.push_back(e1);
    dirs.push_back(-e1);
    if (dim > 1) {
        const Eigen::VectorXd diag = Eigen::VectorXd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
        dirs.push_back(diag);
        dirs.push_back(-diag);
    }
    Grid g;
    const double ratio = std::pow(r_max / r_min, 1.0 / (n_radii - 1));
    double r = r_min;
    for (int i = 0; i < n_radii; ++i, r *= ratio)
        for (const auto& d : dirs) g.push_back(r * d);
    return g;
}

LyapunovCertificate check_lyapunov_kustr(const PotentialDiffusion& diff, double a, double gamma, const Grid& grid,
                                         double R, std::optional<double> c) {
    require_a(a, "check_lyapunov_kustr");
    if (!diff.laplV) throw CapabilityError("check_lyapunov_kustr: potential has no Laplacian");
    const auto& lapl = *diff.laplV;
    auto lhs = [&](const Eigen::VectorXd& x) { return (1 - a) * diff.gradV(x).squaredNorm() - lapl(x); };
    auto rhs = [&](const Eigen::VectorXd& x) { return 1 + std::pow(x.norm(), gamma); };
    LyapunovCertificate cert;
    cert.condition = LyapunovCondition::kustr;
    cert.params = {{"a", a}, {"gamma", gamma}, {"R", R}};
    finish_constant_certificate(cert, scan_ratio(grid, R, lhs, rhs), c, grid, R, lhs, rhs);
    return cert;
}

LyapunovCertificate check_lyapunov_simpl(const PotentialDiffusion& diff, double gamma, const Grid& grid, double R,
                                         std::optional<double> c) {
    auto lhs = [&](const Eigen::VectorXd& x) {
        const double r = x.norm();
        return std::pow(r, gamma / 2) * x.dot(diff.gradV(x)) / r;
    };
    auto rhs = [&](const Eigen::VectorXd& x) { return 1 + std::pow(x.norm(), gamma); };
    LyapunovCertificate cert;
    cert.condition = LyapunovCondition::simpl;
    cert.params = {{"gamma", gamma}, {"R", R}};
    finish_constant_certificate(cert, scan_ratio(grid, std::max(R, 1e-300), lhs, rhs), c, grid,
                                std::max(R, 1e-300), lhs, rhs);
    return cert;
}

LyapunovCertificate check_lyapunov_kustr2(const PotentialDiffusion& diff, double a,
                                          const std::function<double(const Eigen::VectorXd&)>& phi_tilde,
                                          const Grid& grid, double R) {
    require_a(a, "check_lyapunov_kustr2");
    if (!(a > 0)) throw PreconditionError("check_lyapunov_kustr2: a must be > 0");
    if (!diff.laplV) throw CapabilityError("check_lyapunov_kustr2: potential has no Laplacian");
    const auto& lapl = *diff.laplV;
    LyapunovCertificate cert;
    cert.condition = LyapunovCondition::kustr2;
    cert.params = {{"a", a}, {"R", R}};
    cert.ball_radius = R;

    double margin = std::numeric_limits<double>::infinity();
    long pts = 0;
    for (const auto& x : grid) {
        if (x.norm() < R) continue;
        const double pt = phi_tilde(x);
        if (!(pt > 0)) throw DomainError("check_lyapunov_kustr2: phi_tilde must be positive");
        margin = std::min(margin, (1 - a) * diff.gradV(x).squaredNorm() - lapl(x) - pt);
        ++pts;
    }
    cert.grid_points = pts;
    cert.margin = pts ? margin : 0.0;

    // ∫ e^{(a−1)V} dx < ∞ for radial V: the radial integrand r^{d−1} e^{(a−1)v(r)}
    // must decay faster than 1/r, read off its log-slope far out.
    std::ostringstream os;
    if (diff.radial) {
        const double r_far = 1e6;
        const double slope = (diff.dim - 1) + (a - 1) * diff.radial->dv(r_far) * r_far;
        cert.integrable = slope < -1.0 - 1e-3;
        os << "log-slope of r^(d-1) e^((a-1)V) at r=1e6: " << slope << "; ";
    } else {
        os << "integrability of e^((a-1)V) unknown for a non-radial potential; ";
    }
    cert.pass = pts > 0 && margin >= 0 && cert.integrable.value_or(false);
    os << "min slack " << cert.margin << " over " << pts << " points with |x| >= R (grid certificate)";
    cert.note = os.str();
    if (cert.pass) cert.phi = [a, phi_tilde](const Eigen::VectorXd& x) { return a * phi_tilde(x); };
    return cert;
}

LyapunovCertificate check_lyapunov_bd(const BirthDeathSpec& spec, const std::function<double(long)>& phi0,
                                      double kappa, long N_from, long N_probe) {
    if (!(kappa > 1)) throw DomainError("check_lyapunov_bd: kappa must be > 1");
    if (N_from < 0 || N_probe < N_from) throw DomainError("check_lyapunov_bd: need 0 <= N_from <= N_probe");
    const double shrink = (kappa - 1) / kappa;
    auto death = [&](long n) { return n == 0 ? 0.0 : spec.a(n); };

    LyapunovCertificate cert;
    cert.condition = LyapunovCondition::bd;
    cert.params = {{"kappa", kappa}, {"N_from", static_cast<double>(N_from)},
                   {"N_probe", static_cast<double>(N_probe)}};
    double margin = std::numeric_limits<double>::infinity();
    for (long n = N_from; n <= N_probe; ++n) {
        const double p0 = phi0(n);
        if (!(p0 > 0)) throw DomainError("check_lyapunov_bd: phi0 must be positive");
        margin = std::min(margin, death(n) - kappa * spec.b(n) - p0);
    }
    double b = 0.0;
    for (long n = 0; n < N_from; ++n) b = std::max(b, shrink * (phi0(n) + kappa * spec.b(n) - death(n)));
    cert.grid_points = N_probe - N_from + 1;
    cert.margin = margin;
    cert.b = b;
    cert.pass = margin >= 0;
    cert.phi_chain = [shrink, phi0](long n) { return shrink * phi0(n); };
    std::ostringstream os;
    os << "a_n - kappa b_n - phi0(n) >= " << margin << " on [" << N_from << ", " << N_probe
       << "]; phi = (1 - 1/kappa) phi0, b = " << b << " (finite probe)";
    cert.note = os.str();
    return cert;
}

LyapunovCertificate check_lyapunov_bd_subgeom(const BirthDeathSpec& spec, double m, long N_probe) {
    if (!(m > 0)) throw DomainError("check_lyapunov_bd_subgeom: m must be > 0");
    if (N_probe < 100) throw DomainError("check_lyapunov_bd_subgeom: N_probe must be >= 100");

    LyapunovCertificate cert;
    cert.condition = LyapunovCondition::bd_subgeom;
    cert.params = {{"m", m}, {"N_probe", static_cast<double>(N_probe)}};
    cert.grid_points = N_probe + 1;

    // First N beyond which c_n = a_n − b_n stays positive up to the probe end.
    long first_positive = N_probe + 1;
    for (long n = N_probe; n >= 1; --n) {
        if (spec.a(n) - spec.b(n) > 0)
            first_positive = n;
        else
            break;
    }
    const bool cofinal = first_positive <= N_probe - N_probe / 10;
    cert.params["N"] = static_cast<double>(first_positive);

    cert.recurrence = recurrence_diagnostic(spec, N_probe);
    const bool recurrent = cert.recurrence->verdict == RecurrenceVerdict::likely_positive_recurrent;
    // Σ n^m μ_n < ∞ when n^m μ_n decays faster than 1/n.
    const double moment_slope = m + cert.recurrence->tail_log_slope;
    const bool moment_ok = moment_slope < -1.05;

    // Drift of U(n) = (1+n)^m against φ(n) = (m − δ) c_n/(1+n), δ = m/2.
    const double delta = m / 2;
    auto drift = [&](long n) {
        const double u = std::pow(1.0 + n, m);
        double lu = spec.b(n) * (std::pow(2.0 + n, m) - u);
        if (n > 0) lu += spec.a(n) * (std::pow(static_cast<double>(n), m) - u);
        return -lu / u;
    };
    auto phi = [&spec, m, delta](long n) {
        const double cn = n == 0 ? 0.0 : spec.a(n) - spec.b(n);
        return (m - delta) * std::max(0.0, cn) / (1.0 + n);
    };
    long drift_from = N_probe + 1;
    for (long n = N_probe; n >= 0; --n) {
        if (drift(n) >= phi(n))
            drift_from = n;
        else
            break;
    }
    double b = 0.0;
    for (long n = 0; n < std::min(drift_from, N_probe + 1); ++n) b = std::max(b, phi(n) - drift(n));
    cert.b = b;
    cert.margin = moment_slope;

    cert.pass = cofinal && recurrent && moment_ok && drift_from <= N_probe;
    if (cert.pass) cert.phi_chain = phi;
    const double n_end = static_cast<double>(N_probe);
    std::ostringstream os;
    os << "c_n > 0 from n=" << first_positive << (cofinal ? "" : " (not cofinal)") << "; recurrence: "
       << to_string(cert.recurrence->verdict) << "; n^m mu_n log-slope " << moment_slope
       << (moment_ok ? " (summable)" : " (moment appears infinite)") << "; -LU/U at N_probe = " << drift(N_probe)
       << " vs m c_n/n = " << m * (spec.a(N_probe) - spec.b(N_probe)) / n_end << " (finite probe)";
    cert.note = os.str();
    return cert;
}

}  // namespace bernstein
