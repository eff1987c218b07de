#pragma once

#include <span>
#include <vector>

#include "chstab/graph_laplacian.hpp"

namespace chstab {

/// Convolution kernel of (I - k Lap)^{-1} on an n-point periodic chain,
/// parameterized by the contraction factor theta = 2k/(2k + dx^2):
///   c_j = (1 - theta)/n * sum_k cos(2 pi j k / n) / (1 - theta cos(2 pi k / n)).
/// The coefficients are strictly positive for theta in (0,1) and sum to one,
/// so the resolvent averages rather than amplifies.
///
/// epsilon_sharp is the exact sup-norm contraction factor on mean-zero data;
/// epsilon_perturbation = 1 - n * min_j c_j is the simpler upper bound for it.
struct ResolventKernel {
    int size;
    double theta;
    std::vector<double> coefficients;
    double epsilon_sharp;
    double epsilon_perturbation;
};

ResolventKernel kernel_1d_periodic(int n, double theta);

/// Circular convolution (c * f)_i = sum_j c_{(i-j) mod n} f_j.
std::vector<double> circular_convolve(std::span<const double> c, std::span<const double> f);

/// Maximum of sum_j c_j s_j over vectors s with |s_j| <= 1 and sum_j s_j = 0,
/// for coefficients sorted in ascending order:
///   value = (sum of the top floor(n/2) entries) - (sum of the bottom floor(n/2)).
/// The maximizer puts -1 on the bottom half, +1 on the top half, and 0 on the
/// middle entry when n is odd.  Throws std::invalid_argument if c is not
/// ascending.
struct MeanZeroMaximum {
    double value;
    std::vector<double> argmax;
};

MeanZeroMaximum maximize_linear_meanzero(std::span<const double> ascending_c);

/// Sharp sup-norm contraction constant of a nonnegative averaging kernel on
/// mean-zero data; sorts a copy of c and applies the closed form above.
double sharp_meanzero_constant(std::span<const double> c);

/// Resolvent kernel of a general conservative symmetric operator, column l
/// being (I - k Lap)^{-1} applied to the unit vector at l.  For a connected
/// operator every entry is strictly positive and
///   ||(I - k Lap)^{-1} f||_inf <= (1 - n eps0) ||f||_inf
/// for mean-zero f, where eps0 is the smallest kernel entry.  A disconnected
/// operator is flagged degenerate: eps0 = 0 and the bound collapses to 1.
struct GeneralKernel {
    std::size_t vertex_count;
    double k;
    double theta;
    std::vector<std::vector<double>> columns;
    double epsilon0;
    double epsilon; // 1 - vertex_count * epsilon0
    bool degenerate;
};

GeneralKernel general_kernel(const GraphLaplacianOp& op, double k);

} // namespace chstab
