#include "chstab/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chstab {

TorusGrid::TorusGrid(int dim, int points_per_dim) : dim_(dim), n_(points_per_dim) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("TorusGrid: dim must be 1, 2 or 3, got " + std::to_string(dim));
    if (points_per_dim < 2)
        throw std::invalid_argument("TorusGrid: need at least 2 points per axis, got " +
                                    std::to_string(points_per_dim));
}

double TorusGrid::spacing() const {
    return 2.0 * std::numbers::pi / static_cast<double>(n_);
}

double TorusGrid::coordinate(int index) const {
    return spacing() * static_cast<double>(index);
}

std::size_t TorusGrid::point_count() const {
    std::size_t count = 1;
    for (int d = 0; d < dim_; ++d) count *= static_cast<std::size_t>(n_);
    return count;
}

double TorusGrid::cell_volume() const {
    double vol = 1.0;
    for (int d = 0; d < dim_; ++d) vol *= spacing();
    return vol;
}

void TorusGrid::unflatten(std::size_t flat, int (&idx)[3]) const {
    idx[0] = idx[1] = idx[2] = 0;
    const auto n = static_cast<std::size_t>(n_);
    for (int d = dim_ - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(flat % n);
        flat /= n;
    }
}

namespace {

void require_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("Field: non-finite sample");
}

} // namespace

Field::Field(const TorusGrid& grid) : grid_(grid), values_(grid.point_count(), 0.0) {}

Field::Field(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.point_count())
        throw std::invalid_argument("Field: value count does not match grid");
    require_finite(values_);
}

double stable_sum(std::span<const double> values) {
    double sum = 0.0, carry = 0.0;
    for (double x : values) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

FieldStats norms_and_mean(const Field& u) {
    double linf = 0.0;
    double sq = 0.0, carry = 0.0;
    for (double x : u.values()) {
        linf = std::max(linf, std::abs(x));
        const double y = x * x - carry;
        const double t = sq + y;
        carry = (t - sq) - y;
        sq = t;
    }
    const double n = static_cast<double>(u.size());
    return FieldStats{linf, std::sqrt(u.grid().cell_volume() * sq),
                      stable_sum(u.values()) / n};
}

} // namespace chstab
