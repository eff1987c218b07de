#include "chstab/resolvent_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace chstab {

ResolventKernel kernel_1d_periodic(int n, double theta) {
    if (n < 2) throw std::invalid_argument("kernel_1d_periodic: need n >= 2");
    if (!(theta >= 0.0) || !(theta < 1.0))
        throw std::invalid_argument("kernel_1d_periodic: theta must lie in [0, 1)");

    // The defining trigonometric sum
    //   c_j = (1-theta)/n * sum_k cos(2 pi j k / n) / (1 - theta cos(2 pi k / n))
    // is evaluated through its geometric image form
    //   c_j = (1-theta)/sqrt(1-theta^2) * (r^j + r^(n-j)) / (1 - r^n),
    //   r   = theta / (1 + sqrt(1-theta^2)),
    // which is the same function of (n, theta) but free of cancellation, so
    // the strict positivity of the coefficients survives in floating point.
    const double s = std::sqrt((1.0 - theta) * (1.0 + theta));
    const double r = theta / (1.0 + s);
    const double front = (1.0 - theta) / s;
    const double tail = 1.0 - std::pow(r, n);
    std::vector<double> c(n, 0.0);
    for (int j = 0; j < n; ++j)
        c[j] = front * (std::pow(r, j) + std::pow(r, n - j)) / tail;

    double cmin = c[0];
    for (double x : c) cmin = std::min(cmin, x);
    const double sharp = sharp_meanzero_constant(c);
    return ResolventKernel{n, theta, std::move(c), sharp, 1.0 - n * cmin};
}

std::vector<double> circular_convolve(std::span<const double> c, std::span<const double> f) {
    const std::size_t n = c.size();
    if (f.size() != n) throw std::invalid_argument("circular_convolve: size mismatch");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += c[(i + n - j) % n] * f[j];
        out[i] = acc;
    }
    return out;
}

MeanZeroMaximum maximize_linear_meanzero(std::span<const double> ascending_c) {
    const std::size_t n = ascending_c.size();
    if (n == 0) throw std::invalid_argument("maximize_linear_meanzero: empty input");
    for (std::size_t i = 1; i < n; ++i)
        if (ascending_c[i] < ascending_c[i - 1])
            throw std::invalid_argument("maximize_linear_meanzero: coefficients not ascending");

    const std::size_t half = n / 2;
    std::vector<double> argmax(n, 0.0);
    double value = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        argmax[i] = -1.0;
        argmax[n - 1 - i] = 1.0;
        value += ascending_c[n - 1 - i] - ascending_c[i];
    }
    return MeanZeroMaximum{value, std::move(argmax)};
}

double sharp_meanzero_constant(std::span<const double> c) {
    std::vector<double> sorted(c.begin(), c.end());
    std::sort(sorted.begin(), sorted.end());
    return maximize_linear_meanzero(sorted).value;
}

GeneralKernel general_kernel(const GraphLaplacianOp& op, double k) {
    if (!op.conservative() || !op.symmetric())
        throw std::invalid_argument(
            "general_kernel: operator must be conservative and symmetric");
    const std::size_t n = op.vertex_count();

    GeneralKernel kernel;
    kernel.vertex_count = n;
    kernel.k = k;
    kernel.theta = resolvent_contraction_factor(op, k);
    kernel.columns.resize(n);

    double eps0 = std::numeric_limits<double>::infinity();
    std::vector<double> delta(n, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
        delta[l] = 1.0;
        kernel.columns[l] = resolvent_solve(op, k, delta);
        delta[l] = 0.0;
        for (double x : kernel.columns[l]) eps0 = std::min(eps0, x);
    }
    kernel.epsilon0 = eps0;
    kernel.epsilon = 1.0 - static_cast<double>(n) * eps0;
    kernel.degenerate = !op.connected();
    return kernel;
}

} // namespace chstab
