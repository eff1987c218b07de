#pragma once

#include <memory>
#include <span>
#include <vector>

#include "chstab/graph_laplacian.hpp"
#include "chstab/grid.hpp"
#include "chstab/stability.hpp"

namespace chstab {

/// Double-well density F(u) = (u^2 - 1)^2 / 4 and its derivative u^3 - u.
double double_well(double u);
double double_well_derivative(double u);

/// One semi-implicit step in Fourier space.  Mode m = |k|^2 updates as
///   u1_hat = ((1 + A tau m) u_hat - tau m fhat(u)) / (1 + nu tau m^2 + A tau m),
/// so the k = 0 coefficient (the mean) passes through untouched.  With
/// `dealias` set, modes of the cubic term above n/3 are dropped first.
Field step_spectral(const Field& u, const SchemeParams& p, bool dealias = false);

/// The same spectral update computed along the factorized two-resolvent route
/// that the sup-norm certificate follows:
///   u1 = R2[ (f2(u) + R1 f1(u)) / (beta A) ],
///   f1(x) = x^3 - ((1-beta) A + 1) x,   f2(x) = -x^3 + (A + 1) x,
///   R1 = (I - beta A tau Lap)^{-1},     R2 = (I - (1-beta) A tau Lap)^{-1}.
/// The cubic term always enters unfiltered here (the sup-norm argument needs
/// the pointwise values).  Requires an admissible certificate for ||u||_inf;
/// throws std::domain_error otherwise.
Field invariant_region_step_spectral(const Field& u, const SchemeParams& p);

/// Graph-backend step: solves
///   (I + nu tau L^2 - A tau L) u1 = u - A tau L u + tau L (u^3 - u)
/// by conjugate gradients (the operator is symmetric positive definite for
/// symmetric L).  For conservative L the sum of u1 is pinned to the sum of u
/// after the solve, so the discrete mean is conserved exactly.
std::vector<double> step_graph(std::span<const double> u, const SchemeParams& p,
                               const GraphLaplacianOp& op);

/// Two-resolvent route on the graph backend, built from sup-norm
/// nonexpansive resolvent solves; inherits their bound preservation.
/// Requires an admissible certificate for ||u||_inf.
std::vector<double> invariant_region_step_graph(std::span<const double> u,
                                                const SchemeParams& p,
                                                const GraphLaplacianOp& op);

/// Discrete free energy E(u) = (nu/2) ||grad u||_2^2 + h^d sum F(u_i), with
/// the gradient term given by the backend's Dirichlet form.
double energy_spectral(const Field& u, double nu);
double energy_graph(const Field& u, double nu, const GraphLaplacianOp& op);

/// Per-transition audit row.  Row n describes the arrival state u^n together
/// with the transition metrics from u^{n-1}:
///   increment_l2         = ||u^n - u^{n-1}||_2
///   grad_h_l2            = ||grad H||_2,  H = -nu Lap u^n + A (u^n - u^{n-1}) + f(u^{n-1})
///   dissipation_residual = E(u^{n-1}) - E(u^n) - (A/2) increment_l2^2 - tau grad_h_l2^2,
/// which the energy law predicts to be nonnegative for admissible parameters.
struct EnergyReport {
    long step;
    double time;
    double energy;
    double linf;
    double mean;
    double increment_l2;
    double grad_h_l2;
    double dissipation_residual;
};

/// A discretization bound to fixed scheme parameters.  step() advances one
/// time step; the energy and report helpers use the backend's own Dirichlet
/// form so the audit identities hold to rounding, not just to mesh accuracy.
class SchemeBackend {
public:
    virtual ~SchemeBackend() = default;

    const SchemeParams& params() const { return params_; }
    const TorusGrid& grid() const { return grid_; }

    virtual Field step(const Field& u) const = 0;
    virtual Field invariant_region_step(const Field& u) const = 0;
    virtual Field laplacian(const Field& u) const = 0;
    /// The cubic term exactly as the step uses it (filtered when dealiasing).
    virtual Field nonlinear_term(const Field& u) const = 0;
    virtual double dirichlet_form(const Field& u) const = 0;
    virtual bool conserves_mean() const = 0;

    double energy(const Field& u) const;
    EnergyReport initial_report(const Field& u) const;
    EnergyReport transition_report(long step_index, const Field& prev, const Field& next) const;

protected:
    SchemeBackend(SchemeParams params, TorusGrid grid) : params_(params), grid_(grid) {}

    SchemeParams params_;
    TorusGrid grid_;
};

class SpectralBackend final : public SchemeBackend {
public:
    SpectralBackend(SchemeParams params, TorusGrid grid, bool dealias = false);

    Field step(const Field& u) const override;
    Field invariant_region_step(const Field& u) const override;
    Field laplacian(const Field& u) const override;
    Field nonlinear_term(const Field& u) const override;
    double dirichlet_form(const Field& u) const override;
    bool conserves_mean() const override { return true; }

private:
    bool dealias_;
};

class GraphBackend final : public SchemeBackend {
public:
    /// Stencil operator matching the grid: central differences in 1d, the
    /// five-point stencil in 2d.  3d grids are not supported on this backend.
    GraphBackend(SchemeParams params, TorusGrid grid);

    /// Custom operator; vertex count must equal the grid point count.
    GraphBackend(SchemeParams params, TorusGrid grid, GraphLaplacianOp op);

    const GraphLaplacianOp& op() const { return op_; }

    Field step(const Field& u) const override;
    Field invariant_region_step(const Field& u) const override;
    Field laplacian(const Field& u) const override;
    Field nonlinear_term(const Field& u) const override;
    double dirichlet_form(const Field& u) const override;
    bool conserves_mean() const override { return op_.conservative(); }

private:
    GraphLaplacianOp op_;
};

} // namespace chstab
