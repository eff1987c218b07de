#include "chstab/run.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace chstab {

RunResult run_scheme(const SchemeBackend& backend, const Field& initial,
                     const RunOptions& options) {
    if (options.steps < 0) throw std::invalid_argument("run_scheme: negative step count");
    if (initial.grid() != backend.grid())
        throw std::invalid_argument("run_scheme: initial data on the wrong grid");

    const double slack = 1e-12;
    RunResult result{{}, initial, 0.0, false};
    result.history.reserve(static_cast<std::size_t>(options.steps) + 1);

    auto audit = [&](const EnergyReport& report) {
        result.max_linf = std::max(result.max_linf, report.linf);
        if (options.linf_bound && report.linf > *options.linf_bound * (1.0 + slack))
            result.bound_violated = true;
    };
    auto snapshot = [&](long n, const Field& u) {
        if (options.snapshot_stride <= 0 || !options.snapshot_sink) return;
        if (n % options.snapshot_stride == 0 || n == options.steps) options.snapshot_sink(n, u);
    };

    result.history.push_back(backend.initial_report(initial));
    audit(result.history.back());
    snapshot(0, initial);

    Field u = initial;
    for (long n = 1; n <= options.steps; ++n) {
        Field next = options.use_invariant_path ? backend.invariant_region_step(u)
                                                : backend.step(u);
        result.history.push_back(backend.transition_report(n, u, next));
        audit(result.history.back());
        u = std::move(next);
        snapshot(n, u);
    }
    result.final_state = std::move(u);
    return result;
}

void write_energy_csv(std::ostream& out, std::span<const EnergyReport> history) {
    out << "step,time,energy,linf,mean,increment_l2,grad_H_l2,dissipation_residual\n";
    char buf[64];
    for (const EnergyReport& r : history) {
        out << r.step;
        for (double v : {r.time, r.energy, r.linf, r.mean, r.increment_l2, r.grad_h_l2,
                         r.dissipation_residual}) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        }
        out << '\n';
    }
}

bool energy_monotone(std::span<const EnergyReport> history, double rel_slack) {
    for (std::size_t i = 1; i < history.size(); ++i) {
        const double prev = history[i - 1].energy;
        if (!(history[i].energy <= prev + rel_slack * std::abs(prev))) return false;
    }
    return true;
}

CriticalTauResult find_critical_tau(
    const std::function<std::unique_ptr<SchemeBackend>(double tau)>& make_backend,
    const Field& initial, long horizon, double tau_lo, double tau_hi, double rel_tol) {
    if (!(tau_lo > 0.0) || !(tau_hi >= tau_lo) || !(rel_tol > 0.0) || horizon < 1)
        throw std::invalid_argument("find_critical_tau: bad search parameters");

    auto decays = [&](double tau) {
        RunOptions opt;
        opt.steps = horizon;
        try {
            return energy_monotone(run_scheme(*make_backend(tau), initial, opt).history);
        } catch (const std::invalid_argument&) {
            return false; // state left the finite range
        } catch (const std::runtime_error&) {
            return false; // linear solve diverged
        }
    };

    const double nan = std::nan("");
    // Degenerate window: a point check, confirmed when the predicate holds.
    if (tau_lo == tau_hi)
        return decays(tau_lo) ? CriticalTauResult{tau_lo, tau_hi, tau_lo, true}
                              : CriticalTauResult{tau_lo, tau_hi, nan, false};
    if (!decays(tau_lo) || decays(tau_hi)) return {tau_lo, tau_hi, nan, false};

    double lo = tau_lo, hi = tau_hi;
    while (hi / lo - 1.0 > rel_tol) {
        const double mid = std::sqrt(lo * hi);
        if (mid <= lo || mid >= hi) break; // bracket at floating-point resolution
        (decays(mid) ? lo : hi) = mid;
    }
    return {lo, hi, lo, true};
}

} // namespace chstab
