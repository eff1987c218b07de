#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chstab {

/// Uniform grid on the periodic torus [-pi, pi]^d, d in {1,2,3}, with the
/// same number of points along every axis.  Point index j along an axis maps
/// to the coordinate j*h with h = 2*pi/n; the torus identifies x with x+2*pi,
/// so the sample set covers the whole domain exactly once.
class TorusGrid {
public:
    TorusGrid(int dim, int points_per_dim);

    int dim() const { return dim_; }
    int points_per_dim() const { return n_; }

    /// Mesh width h = 2*pi/n.  h*n recovers the period exactly up to rounding.
    double spacing() const;

    /// Coordinate of index j along one axis, in [0, 2*pi).
    double coordinate(int index) const;

    /// Total number of points n^d.
    std::size_t point_count() const;

    /// Volume h^d of one mesh cell, the weight of a single sample in
    /// quadrature sums.
    double cell_volume() const;

    /// Decompose a row-major flat index into per-axis indices.
    void unflatten(std::size_t flat, int (&idx)[3]) const;

    bool operator==(const TorusGrid&) const = default;

private:
    int dim_;
    int n_;
};

/// Real scalar field sampled on a TorusGrid, stored row-major (the last axis
/// varies fastest).  All entries are finite; constructors reject NaN/inf.
class Field {
public:
    explicit Field(const TorusGrid& grid);
    Field(const TorusGrid& grid, std::vector<double> values);

    const TorusGrid& grid() const { return grid_; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    std::size_t size() const { return values_.size(); }

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

/// Pointwise statistics of a field together with the quadrature-weighted
/// L2 norm: l2 = sqrt(h^d * sum u_i^2).
struct FieldStats {
    double linf;
    double l2;
    double mean;
};

FieldStats norms_and_mean(const Field& u);

/// Compensated (Kahan) sum; used wherever a grid sum feeds a tolerance-tight
/// comparison.
double stable_sum(std::span<const double> values);

} // namespace chstab
