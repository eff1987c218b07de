#include "chstab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>

namespace chstab {

namespace {

// FFTW plan creation is not thread safe; execution of a ready plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void run_dft(const TorusGrid& grid, std::complex<double>* in, std::complex<double>* out,
             int sign) {
    int n[3] = {grid.points_per_dim(), grid.points_per_dim(), grid.points_per_dim()};
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft(grid.dim(), n, reinterpret_cast<fftw_complex*>(in),
                             reinterpret_cast<fftw_complex*>(out), sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
}

} // namespace

double squared_wavenumber(const TorusGrid& grid, std::size_t flat) {
    int idx[3];
    grid.unflatten(flat, idx);
    double k2 = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
        const double k = wavenumber(idx[d], grid.points_per_dim());
        k2 += k * k;
    }
    return k2;
}

SpectralCoefficients transform(const Field& u) {
    const TorusGrid& grid = u.grid();
    std::vector<std::complex<double>> work(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) work[i] = u[i];
    run_dft(grid, work.data(), work.data(), FFTW_FORWARD);
    const double scale = 1.0 / static_cast<double>(grid.point_count());
    for (auto& c : work) c *= scale;
    return SpectralCoefficients{grid, std::move(work)};
}

Field inverse_transform(const SpectralCoefficients& c) {
    std::vector<std::complex<double>> work = c.values;
    run_dft(c.grid, work.data(), work.data(), FFTW_BACKWARD);
    std::vector<double> real(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) real[i] = work[i].real();
    return Field(c.grid, std::move(real));
}

void apply_laplacian_symbol(SpectralCoefficients& c) {
    for (std::size_t i = 0; i < c.values.size(); ++i)
        c.values[i] *= -squared_wavenumber(c.grid, i);
}

Field spectral_laplacian(const Field& u) {
    SpectralCoefficients c = transform(u);
    apply_laplacian_symbol(c);
    return inverse_transform(c);
}

double dirichlet_form_spectral(const Field& u) {
    const SpectralCoefficients c = transform(u);
    double sum = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < c.values.size(); ++i) {
        const double term = squared_wavenumber(c.grid, i) * std::norm(c.values[i]);
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double volume = 1.0;
    for (int d = 0; d < u.grid().dim(); ++d) volume *= 2.0 * std::numbers::pi;
    return volume * sum;
}

Field dealias_two_thirds(const Field& u) {
    SpectralCoefficients c = transform(u);
    const int n = c.grid.points_per_dim();
    const int cut = n / 3;
    int idx[3];
    for (std::size_t i = 0; i < c.values.size(); ++i) {
        c.grid.unflatten(i, idx);
        for (int d = 0; d < c.grid.dim(); ++d) {
            if (std::abs(wavenumber(idx[d], n)) > cut) {
                c.values[i] = 0.0;
                break;
            }
        }
    }
    return inverse_transform(c);
}

} // namespace chstab
