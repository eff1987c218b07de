#pragma once

namespace chstab {

/// Parameters of the stabilized semi-implicit step
///   (u' - u)/tau = -nu Lap^2 u' + A Lap(u' - u) + Lap(u^3 - u).
/// nu is the interface coefficient, tau the step size, and `stabilization`
/// the coefficient A of the extra damping term.
struct SchemeParams {
    double nu;
    double tau;
    double stabilization;

    SchemeParams(double nu_, double tau_, double stabilization_);

    /// nu / tau, the ratio every admissibility quantity depends on.
    double stiffness_ratio() const { return nu / tau; }
};

/// Smallest stabilization coefficient with a sup-norm certificate:
///   A_cr = 1 + 2 sqrt(1 + (4/3) nu / tau).
/// Always > 3; grows like sqrt(nu/tau) for stiff steps.
double critical_stabilization(double nu, double tau);

/// Root beta in [1/2, 1) of beta(1 - beta) = nu / (A^2 tau), used to split
/// I + nu tau Lap^2 - A tau Lap into (I - beta A tau Lap)(I - (1-beta) A tau Lap).
/// Throws std::domain_error when nu/(A^2 tau) > 1/4 and no real split exists.
double splitting_beta(const SchemeParams& p);

/// Sup-norm window [lower, upper] of the scheme:
///   lower = 2 sqrt((1 + (1-beta) A)/3),  upper = sqrt((A + 1)/3).
/// A step started inside the ball of radius `bound` stays inside whenever
/// lower <= bound <= upper; at A = A_cr the window closes to a point.
struct BoundWindow {
    double lower;
    double upper;
};

BoundWindow bound_window(const SchemeParams& p);

/// Outcome of the sup-norm admissibility check for given parameters and
/// initial sup norm.  `bound` is the certified invariant radius (the window's
/// upper end).  When `admissible` is false the remaining fields still carry
/// whatever quantities were computable (NaN otherwise).
struct StabilityCertificate {
    double critical;     // A_cr for this nu, tau
    double beta;         // splitting root, NaN if no real split
    double window_lower; // NaN if no real split
    double window_upper;
    double bound;        // certified radius M = window_upper
    bool admissible;     // stabilization >= A_cr and initial_linf <= bound
};

StabilityCertificate certify(const SchemeParams& p, double initial_linf);

/// Odd cubic branches appearing in the two-resolvent step:
/// positive branch x^3 - alpha x, negative branch -x^3 + alpha x.
enum class CubicBranch { positive, negative };

/// Envelope of an odd cubic over [-limit, limit]:
///   max_abs  = max_{|x| <= limit} |f(x)|
///   endpoint = f(limit)
///   holds    = (max_abs <= endpoint)
/// For the positive branch, holds is guaranteed when limit >= 2 sqrt(alpha/3);
/// for the negative branch when limit <= sqrt(alpha/3).
struct CubicEnvelope {
    double max_abs;
    double endpoint;
    bool holds;
};

CubicEnvelope cubic_envelope(double alpha, double limit, CubicBranch branch);

/// Step-size heuristic for the unstabilized scheme (A = 0): tau <= 8 nu / L^2
/// where L bounds |f'| = |3u^2 - 1| on the expected solution range.
double unstabilized_tau_limit(double nu, double lipschitz);

} // namespace chstab
