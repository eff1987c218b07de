#pragma once

#include <complex>
#include <vector>

#include "chstab/grid.hpp"

namespace chstab {

/// Fourier coefficients of a real field, stored as the full complex array in
/// the same row-major layout as the field.  The forward transform carries the
/// 1/n^d normalization, so a constant field c has coefficient c at k = 0 and
/// cos(x1) has coefficient 1/2 at k = +-1.
struct SpectralCoefficients {
    TorusGrid grid;
    std::vector<std::complex<double>> values;
};

/// Signed wavenumber of array index j on an n-point axis: 0..n/2 map to
/// themselves, the upper half to negative frequencies.
inline int wavenumber(int index, int n) {
    return (2 * index <= n - 1) ? index : index - n;
}

/// |k|^2 for the mode at a row-major flat index.
double squared_wavenumber(const TorusGrid& grid, std::size_t flat);

SpectralCoefficients transform(const Field& u);

/// Inverse of transform().  Assumes Hermitian-symmetric input (coefficients
/// of a real field); the O(eps) imaginary residue is discarded.
Field inverse_transform(const SpectralCoefficients& c);

/// In-place multiplication by the Laplacian symbol -|k|^2.
void apply_laplacian_symbol(SpectralCoefficients& c);

/// Laplacian of u computed by symbol multiplication in Fourier space.
Field spectral_laplacian(const Field& u);

/// ||grad u||_2^2 = (2*pi)^d * sum_k |k|^2 |u_hat_k|^2.
double dirichlet_form_spectral(const Field& u);

/// Zero every mode with |k| > n/3 along any axis (the standard 2/3 rule for
/// cubic nonlinearities).
Field dealias_two_thirds(const Field& u);

} // namespace chstab
