#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "chstab/scheme.hpp"

namespace chstab {

struct RunOptions {
    long steps = 0;
    /// Advance through the factorized two-resolvent route instead of the
    /// direct solve.  Both compute the same map; the factorized route fails
    /// fast (std::domain_error) when no admissible certificate exists.
    bool use_invariant_path = false;
    /// Sup-norm ceiling to audit against, if any.  A step whose arrival state
    /// exceeds bound * (1 + 1e-12) marks the run as violated; the run still
    /// continues so the full history is available.
    std::optional<double> linf_bound;
    /// When positive, snapshot_sink fires at every step divisible by the
    /// stride (including step 0) and at the final step.
    long snapshot_stride = 0;
    std::function<void(long step, const Field&)> snapshot_sink;
};

struct RunResult {
    /// Row 0 describes the initial state; row n the arrival state of step n.
    std::vector<EnergyReport> history;
    Field final_state;
    double max_linf = 0.0;
    bool bound_violated = false;
};

RunResult run_scheme(const SchemeBackend& backend, const Field& initial, const RunOptions& options);

/// Energy-history CSV, one row per report.
/// Header: step,time,energy,linf,mean,increment_l2,grad_H_l2,dissipation_residual
void write_energy_csv(std::ostream& out, std::span<const EnergyReport> history);

/// True when every consecutive energy pair satisfies
/// E_next <= E_prev + rel_slack * |E_prev|; the slack separates genuine
/// growth from roundoff.
bool energy_monotone(std::span<const EnergyReport> history, double rel_slack = 1e-12);

struct CriticalTauResult {
    /// Largest step size confirmed decaying and smallest confirmed failing;
    /// after a bracketed search, tau_high / tau_low - 1 <= rel_tol.
    double tau_low;
    double tau_high;
    /// Equals tau_low when bracketed, NaN otherwise.
    double tau_critical;
    bool bracketed;
};

/// Geometric bisection for the largest step size whose run from `initial`
/// keeps the energy monotone over `horizon` steps.  A run that blows up
/// (non-finite state, solver divergence) counts as failing.  Requires the
/// predicate to hold at tau_lo and fail at tau_hi; otherwise no search runs
/// and bracketed is false.  tau_lo == tau_hi degenerates into a point check:
/// the value is confirmed (bracketed) exactly when the predicate holds there.
CriticalTauResult find_critical_tau(
    const std::function<std::unique_ptr<SchemeBackend>(double tau)>& make_backend,
    const Field& initial, long horizon, double tau_lo, double tau_hi, double rel_tol);

} // namespace chstab
