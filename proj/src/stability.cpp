#include "chstab/stability.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chstab {

namespace {

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

} // namespace

SchemeParams::SchemeParams(double nu_, double tau_, double stabilization_)
    : nu(nu_), tau(tau_), stabilization(stabilization_) {
    require_positive(nu, "nu");
    require_positive(tau, "tau");
    if (!(stabilization >= 0.0) || !std::isfinite(stabilization))
        throw std::invalid_argument("stabilization must be >= 0 and finite");
}

double critical_stabilization(double nu, double tau) {
    require_positive(nu, "nu");
    require_positive(tau, "tau");
    return 1.0 + 2.0 * std::sqrt(1.0 + (4.0 / 3.0) * (nu / tau));
}

double splitting_beta(const SchemeParams& p) {
    const double a = p.stabilization;
    if (a <= 0.0) throw std::domain_error("splitting_beta: stabilization must be positive");
    const double r = p.nu / (a * a * p.tau);
    if (r > 0.25)
        throw std::domain_error("splitting_beta: stabilization below 2 sqrt(nu/tau), "
                                "implicit operator has no real factorization");
    return 0.5 + std::sqrt(0.25 - r);
}

BoundWindow bound_window(const SchemeParams& p) {
    const double beta = splitting_beta(p);
    const double a = p.stabilization;
    return BoundWindow{2.0 * std::sqrt((1.0 + (1.0 - beta) * a) / 3.0),
                       std::sqrt((a + 1.0) / 3.0)};
}

StabilityCertificate certify(const SchemeParams& p, double initial_linf) {
    if (!(initial_linf >= 0.0) || !std::isfinite(initial_linf))
        throw std::invalid_argument("certify: initial sup norm must be >= 0 and finite");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    StabilityCertificate cert{critical_stabilization(p.nu, p.tau), nan, nan, nan, nan, false};
    cert.bound = std::sqrt((p.stabilization + 1.0) / 3.0);
    cert.window_upper = cert.bound;
    if (p.stabilization > 0.0 && p.nu / (p.stabilization * p.stabilization * p.tau) <= 0.25) {
        cert.beta = splitting_beta(p);
        cert.window_lower = bound_window(p).lower;
    }
    cert.admissible = (p.stabilization >= cert.critical) && (initial_linf <= cert.bound);
    return cert;
}

CubicEnvelope cubic_envelope(double alpha, double limit, CubicBranch branch) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("cubic_envelope: alpha must be >= 0 and finite");
    if (!(limit > 0.0) || !std::isfinite(limit))
        throw std::invalid_argument("cubic_envelope: limit must be positive and finite");

    const double x_crit = std::sqrt(alpha / 3.0); // stationary point of |f| inside (0, limit)
    const double cube = limit * limit * limit;
    const double endpoint =
        (branch == CubicBranch::positive) ? cube - alpha * limit : alpha * limit - cube;
    const double interior = 2.0 * x_crit * x_crit * x_crit;
    double max_abs = std::abs(endpoint);
    if (limit > x_crit) max_abs = std::max(max_abs, interior);
    return CubicEnvelope{max_abs, endpoint, max_abs <= endpoint};
}

double unstabilized_tau_limit(double nu, double lipschitz) {
    require_positive(nu, "nu");
    require_positive(lipschitz, "lipschitz");
    return 8.0 * nu / (lipschitz * lipschitz);
}

} // namespace chstab
