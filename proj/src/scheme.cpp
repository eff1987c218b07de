#include "chstab/scheme.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "chstab/spectral.hpp"

namespace chstab {

double double_well(double u) {
    const double d = u * u - 1.0;
    return 0.25 * d * d;
}

double double_well_derivative(double u) {
    return u * u * u - u;
}

namespace {

double kahan_dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double y = a[i] * b[i] - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double linf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> map_double_well_derivative(std::span<const double> u) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = double_well_derivative(u[i]);
    return out;
}

// Admissibility gate shared by both certified step paths.
double checked_beta(const SchemeParams& p, double sup) {
    const StabilityCertificate cert = certify(p, sup);
    if (!cert.admissible)
        throw std::domain_error(
            "invariant_region_step: no admissible certificate (need stabilization >= " +
            std::to_string(cert.critical) + " and ||u||_inf <= " + std::to_string(cert.bound) +
            ", got " + std::to_string(p.stabilization) + " and " + std::to_string(sup) + ")");
    return cert.beta;
}

// (I - k Lap)^{-1} by symbol division.
SpectralCoefficients spectral_resolvent(SpectralCoefficients c, double k) {
    for (std::size_t i = 0; i < c.values.size(); ++i)
        c.values[i] /= 1.0 + k * squared_wavenumber(c.grid, i);
    return c;
}

} // namespace

Field step_spectral(const Field& u, const SchemeParams& p, bool dealias) {
    const SpectralCoefficients uc = transform(u);
    std::vector<double> fu(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) fu[i] = double_well_derivative(u[i]);
    SpectralCoefficients fc = transform(Field(u.grid(), std::move(fu)));

    const int n = u.grid().points_per_dim();
    const int cut = n / 3;
    SpectralCoefficients out{u.grid(), std::vector<std::complex<double>>(u.size())};
    int idx[3];
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (dealias) {
            u.grid().unflatten(i, idx);
            for (int d = 0; d < u.grid().dim(); ++d)
                if (std::abs(wavenumber(idx[d], n)) > cut) {
                    fc.values[i] = 0.0;
                    break;
                }
        }
        const double m = squared_wavenumber(u.grid(), i);
        const double at = p.stabilization * p.tau * m;
        out.values[i] =
            ((1.0 + at) * uc.values[i] - p.tau * m * fc.values[i]) / (1.0 + p.nu * p.tau * m * m + at);
    }
    return inverse_transform(out);
}

Field invariant_region_step_spectral(const Field& u, const SchemeParams& p) {
    const double beta = checked_beta(p, norms_and_mean(u).linf);
    const double a = p.stabilization;
    const double alpha1 = (1.0 - beta) * a + 1.0;

    std::vector<double> f1(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f1[i] = u[i] * u[i] * u[i] - alpha1 * u[i];
    const Field y = inverse_transform(
        spectral_resolvent(transform(Field(u.grid(), std::move(f1))), beta * a * p.tau));

    std::vector<double> z(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double f2 = -u[i] * u[i] * u[i] + (a + 1.0) * u[i];
        z[i] = (f2 + y[i]) / (beta * a);
    }
    return inverse_transform(
        spectral_resolvent(transform(Field(u.grid(), std::move(z))), (1.0 - beta) * a * p.tau));
}

std::vector<double> step_graph(std::span<const double> u, const SchemeParams& p,
                               const GraphLaplacianOp& op) {
    const std::size_t n = op.vertex_count();
    if (u.size() != n) throw std::invalid_argument("step_graph: size mismatch");
    if (!op.symmetric())
        throw std::invalid_argument("step_graph: conjugate gradients needs a symmetric operator");

    const double a = p.stabilization, tau = p.tau, nu = p.nu;

    const std::vector<double> lap_u = op.apply(u);
    const std::vector<double> lap_f = op.apply(map_double_well_derivative(u));
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = u[i] - a * tau * lap_u[i] + tau * lap_f[i];

    // matvec for I + nu tau L^2 - A tau L
    std::vector<double> t1(n), t2(n);
    auto matvec = [&](const std::vector<double>& x, std::vector<double>& out) {
        op.apply(x, t1);
        op.apply(t1, t2);
        for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + nu * tau * t2[i] - a * tau * t1[i];
    };

    std::vector<double> x(u.begin(), u.end());
    std::vector<double> r(n), pdir(n), mp(n);
    matvec(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    pdir = r;

    const double rhs_norm = std::sqrt(kahan_dot(rhs, rhs));
    const double tol = 1e-13 * rhs_norm;
    double rr = kahan_dot(r, r);
    const long itmax = 10 * static_cast<long>(n) + 100;
    long iter = 0;
    while (std::sqrt(rr) > tol) {
        if (iter++ >= itmax)
            throw std::runtime_error("step_graph: conjugate gradients did not converge");
        matvec(pdir, mp);
        const double alpha = rr / kahan_dot(pdir, mp);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * pdir[i];
            r[i] -= alpha * mp[i];
        }
        const double rr_new = kahan_dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) pdir[i] = r[i] + beta * pdir[i];
    }

    if (op.conservative()) {
        // The exact solution has sum(x) = sum(u); repair the solver's defect.
        const std::vector<double> ones(n, 1.0);
        const double defect = (kahan_dot(u, ones) - kahan_dot(x, ones)) / static_cast<double>(n);
        for (double& xi : x) xi += defect;
    }
    return x;
}

std::vector<double> invariant_region_step_graph(std::span<const double> u, const SchemeParams& p,
                                                const GraphLaplacianOp& op) {
    const std::size_t n = op.vertex_count();
    if (u.size() != n) throw std::invalid_argument("invariant_region_step_graph: size mismatch");
    const double beta = checked_beta(p, linf(u));
    const double a = p.stabilization;
    const double alpha1 = (1.0 - beta) * a + 1.0;

    std::vector<double> f1(n);
    for (std::size_t i = 0; i < n; ++i) f1[i] = u[i] * u[i] * u[i] - alpha1 * u[i];
    const std::vector<double> y = resolvent_solve(op, beta * a * p.tau, f1);

    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f2 = -u[i] * u[i] * u[i] + (a + 1.0) * u[i];
        z[i] = (f2 + y[i]) / (beta * a);
    }
    return resolvent_solve(op, (1.0 - beta) * a * p.tau, z);
}

namespace {

double well_sum(const Field& u) {
    double sum = 0.0, carry = 0.0;
    for (double x : u.values()) {
        const double y = double_well(x) - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace

double energy_spectral(const Field& u, double nu) {
    return 0.5 * nu * dirichlet_form_spectral(u) + u.grid().cell_volume() * well_sum(u);
}

double energy_graph(const Field& u, double nu, const GraphLaplacianOp& op) {
    const std::vector<double> lap = op.apply(u.values());
    const double dirichlet = -u.grid().cell_volume() * kahan_dot(u.values(), lap);
    return 0.5 * nu * dirichlet + u.grid().cell_volume() * well_sum(u);
}

double SchemeBackend::energy(const Field& u) const {
    return 0.5 * params_.nu * dirichlet_form(u) + u.grid().cell_volume() * well_sum(u);
}

EnergyReport SchemeBackend::initial_report(const Field& u) const {
    const FieldStats s = norms_and_mean(u);
    return EnergyReport{0, 0.0, energy(u), s.linf, s.mean, 0.0, 0.0, 0.0};
}

EnergyReport SchemeBackend::transition_report(long step_index, const Field& prev,
                                              const Field& next) const {
    const double a = params_.stabilization, tau = params_.tau, nu = params_.nu;

    std::vector<double> delta(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) delta[i] = next[i] - prev[i];
    const double inc_sq = next.grid().cell_volume() * kahan_dot(delta, delta);

    const Field lap_next = laplacian(next);
    const Field f_prev = nonlinear_term(prev);
    std::vector<double> h(next.size());
    for (std::size_t i = 0; i < next.size(); ++i)
        h[i] = -nu * lap_next[i] + a * delta[i] + f_prev[i];
    const double grad_h_sq = dirichlet_form(Field(next.grid(), std::move(h)));

    const double e_prev = energy(prev);
    const double e_next = energy(next);
    const FieldStats s = norms_and_mean(next);
    return EnergyReport{step_index,
                        static_cast<double>(step_index) * tau,
                        e_next,
                        s.linf,
                        s.mean,
                        std::sqrt(inc_sq),
                        std::sqrt(grad_h_sq),
                        e_prev - e_next - 0.5 * a * inc_sq - tau * grad_h_sq};
}

SpectralBackend::SpectralBackend(SchemeParams params, TorusGrid grid, bool dealias)
    : SchemeBackend(params, grid), dealias_(dealias) {}

Field SpectralBackend::step(const Field& u) const { return step_spectral(u, params_, dealias_); }

Field SpectralBackend::invariant_region_step(const Field& u) const {
    return invariant_region_step_spectral(u, params_);
}

Field SpectralBackend::laplacian(const Field& u) const { return spectral_laplacian(u); }

Field SpectralBackend::nonlinear_term(const Field& u) const {
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = double_well_derivative(u[i]);
    Field field(u.grid(), std::move(f));
    return dealias_ ? dealias_two_thirds(field) : field;
}

double SpectralBackend::dirichlet_form(const Field& u) const {
    return dirichlet_form_spectral(u);
}

namespace {

GraphLaplacianOp stencil_for_grid(const TorusGrid& grid) {
    if (grid.dim() == 1) return central_difference_periodic(grid.points_per_dim(), grid.spacing());
    if (grid.dim() == 2) return five_point_periodic(grid.points_per_dim(), grid.spacing());
    throw std::invalid_argument("GraphBackend: no stencil operator for dim 3 grids");
}

} // namespace

GraphBackend::GraphBackend(SchemeParams params, TorusGrid grid)
    : SchemeBackend(params, grid), op_(stencil_for_grid(grid)) {}

GraphBackend::GraphBackend(SchemeParams params, TorusGrid grid, GraphLaplacianOp op)
    : SchemeBackend(params, grid), op_(std::move(op)) {
    if (op_.vertex_count() != grid.point_count())
        throw std::invalid_argument("GraphBackend: operator size does not match grid");
}

Field GraphBackend::step(const Field& u) const {
    return Field(u.grid(), step_graph(u.values(), params_, op_));
}

Field GraphBackend::invariant_region_step(const Field& u) const {
    return Field(u.grid(), invariant_region_step_graph(u.values(), params_, op_));
}

Field GraphBackend::laplacian(const Field& u) const {
    return Field(u.grid(), op_.apply(u.values()));
}

Field GraphBackend::nonlinear_term(const Field& u) const {
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = double_well_derivative(u[i]);
    return Field(u.grid(), std::move(f));
}

double GraphBackend::dirichlet_form(const Field& u) const {
    return -u.grid().cell_volume() * kahan_dot(u.values(), op_.apply(u.values()));
}

} // namespace chstab
