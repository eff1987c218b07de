#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace chstab {

/// Weighted graph Laplacian acting as
///   (L u)_i = -w_ii u_i + sum_{j != i} w_ij u_j
/// with nonnegative couplings w_ij and diagonal dominance
/// w_ii >= sum_{j != i} w_ij on every row.  When equality holds on every row
/// the operator is conservative: L annihilates constants and, if symmetric,
/// preserves the sum of any vector it is applied to.
///
/// Diagonal dominance is exactly the property that makes (I - k L)^{-1}
/// nonexpansive in the sup norm for every k > 0, which is what the stepping
/// scheme's sup-norm certificate relies on.
class GraphLaplacianOp {
public:
    struct Coupling {
        std::uint32_t neighbor;
        double weight;
    };

    /// General constructor: per-row couplings plus an explicit diagonal.
    /// Throws std::invalid_argument on negative weights, self-couplings,
    /// out-of-range neighbors, or a diagonal-dominance violation.
    GraphLaplacianOp(std::vector<std::vector<Coupling>> rows, std::vector<double> diagonal);

    /// Conservative operator: the diagonal is the row sum of the couplings.
    static GraphLaplacianOp conservative(std::vector<std::vector<Coupling>> rows);

    std::size_t vertex_count() const { return diagonal_.size(); }
    bool conservative() const { return conservative_; }
    bool symmetric() const { return symmetric_; }

    double diagonal(std::size_t i) const { return diagonal_[i]; }
    double max_diagonal() const { return max_diagonal_; }
    std::span<const Coupling> couplings(std::size_t i) const { return rows_[i]; }

    void apply(std::span<const double> u, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> u) const;

    /// L(L u); the scheme's implicit operator needs the square, never L^2
    /// assembled explicitly.
    std::vector<double> apply_squared(std::span<const double> u) const;

    /// True when every pair of vertices is joined through positive couplings.
    bool connected() const;

private:
    std::vector<std::vector<Coupling>> rows_;
    std::vector<double> diagonal_;
    double max_diagonal_ = 0.0;
    bool conservative_ = false;
    bool symmetric_ = false;
};

/// Second-difference operator u'' ~ (u_{i-1} - 2 u_i + u_{i+1}) / dx^2 on a
/// periodic 1d chain of n vertices.
GraphLaplacianOp central_difference_periodic(int n, double dx);

/// Same stencil with zero boundary values: the ghost neighbors of the two end
/// vertices are dropped while their diagonal keeps the full 2/dx^2, so the
/// ends are strictly dominant and the operator is not conservative.
GraphLaplacianOp central_difference_dirichlet(int n, double dx);

/// Five-point stencil on a periodic n x n grid, row-major vertex order.
GraphLaplacianOp five_point_periodic(int n, double h);

/// Contraction parameter theta = max_i k w_ii / (1 + k w_ii) of the damped
/// Jacobi fixed-point map for (I - k L) u = f.  Always in [0, 1).
double resolvent_contraction_factor(const GraphLaplacianOp& op, double k);

/// Solve (I - k L) u = f, k > 0, by the half-damped fixed-point iteration
///   u <- u/2 + (k W_off u + f) / (2 (1 + k w_ii))
/// started at u = f.  Each update is a convex combination of values bounded
/// by max(||u||_inf, ||f||_inf), so every iterate satisfies
/// ||u||_inf <= ||f||_inf and the solution inherits the sup-norm bound of the
/// data up to rounding.  Stops once the residual sup norm falls below
/// ||f||_inf * max(1e-12, 8 eps (1 + 2 k max w_ii)); the error is bounded by
/// the residual because the resolvent is nonexpansive.
std::vector<double> resolvent_solve(const GraphLaplacianOp& op, double k,
                                    std::span<const double> f);

/// Plain-text operator exchange format.  Header line "n conservative_flag";
/// each following line "i j w" adds the coupling w between distinct vertices
/// i and j (both directions).  When the flag is 0, lines with i == j set the
/// diagonal entry instead; when it is 1 the diagonal is derived from the row
/// sums and self-lines are rejected.
GraphLaplacianOp read_edge_list(std::istream& in);
GraphLaplacianOp read_edge_list_file(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const GraphLaplacianOp& op);

} // namespace chstab
