#include "chstab/graph_laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace chstab {

namespace {

constexpr double kRelTol = 1e-12;

void canonicalize_row(std::vector<GraphLaplacianOp::Coupling>& row) {
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.neighbor < b.neighbor; });
    std::size_t keep = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (keep > 0 && row[keep - 1].neighbor == row[i].neighbor)
            row[keep - 1].weight += row[i].weight;
        else
            row[keep++] = row[i];
    }
    row.resize(keep);
}

double row_sum(const std::vector<GraphLaplacianOp::Coupling>& row) {
    double s = 0.0;
    for (const auto& c : row) s += c.weight;
    return s;
}

} // namespace

GraphLaplacianOp::GraphLaplacianOp(std::vector<std::vector<Coupling>> rows,
                                   std::vector<double> diagonal)
    : rows_(std::move(rows)), diagonal_(std::move(diagonal)) {
    const std::size_t n = diagonal_.size();
    if (rows_.size() != n)
        throw std::invalid_argument("GraphLaplacianOp: row/diagonal count mismatch");
    if (n == 0) throw std::invalid_argument("GraphLaplacianOp: empty operator");

    conservative_ = true;
    for (std::size_t i = 0; i < n; ++i) {
        canonicalize_row(rows_[i]);
        for (const auto& c : rows_[i]) {
            if (c.neighbor >= n)
                throw std::invalid_argument("GraphLaplacianOp: neighbor index out of range");
            if (c.neighbor == i)
                throw std::invalid_argument("GraphLaplacianOp: self-coupling in row " +
                                            std::to_string(i));
            if (!(c.weight >= 0.0) || !std::isfinite(c.weight))
                throw std::invalid_argument("GraphLaplacianOp: coupling weights must be >= 0");
        }
        if (!std::isfinite(diagonal_[i]) || diagonal_[i] < 0.0)
            throw std::invalid_argument("GraphLaplacianOp: diagonal must be finite and >= 0");
        const double s = row_sum(rows_[i]);
        const double scale = std::max(diagonal_[i], s);
        if (diagonal_[i] < s - kRelTol * scale)
            throw std::invalid_argument("GraphLaplacianOp: row " + std::to_string(i) +
                                        " violates diagonal dominance");
        if (std::abs(diagonal_[i] - s) > kRelTol * scale) conservative_ = false;
        max_diagonal_ = std::max(max_diagonal_, diagonal_[i]);
    }

    symmetric_ = true;
    for (std::size_t i = 0; i < n && symmetric_; ++i) {
        for (const auto& c : rows_[i]) {
            const auto& peer = rows_[c.neighbor];
            const auto it = std::lower_bound(
                peer.begin(), peer.end(), static_cast<std::uint32_t>(i),
                [](const Coupling& a, std::uint32_t v) { return a.neighbor < v; });
            const double back =
                (it != peer.end() && it->neighbor == i) ? it->weight : 0.0;
            if (std::abs(back - c.weight) > kRelTol * std::max(back, c.weight)) {
                symmetric_ = false;
                break;
            }
        }
    }
}

GraphLaplacianOp GraphLaplacianOp::conservative(std::vector<std::vector<Coupling>> rows) {
    std::vector<double> diag(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        canonicalize_row(rows[i]);
        diag[i] = row_sum(rows[i]);
    }
    return GraphLaplacianOp(std::move(rows), std::move(diag));
}

void GraphLaplacianOp::apply(std::span<const double> u, std::span<double> out) const {
    const std::size_t n = vertex_count();
    if (u.size() != n || out.size() != n)
        throw std::invalid_argument("GraphLaplacianOp::apply: size mismatch");
    if (u.data() == out.data())
        throw std::invalid_argument("GraphLaplacianOp::apply: aliased arguments");
    for (std::size_t i = 0; i < n; ++i) {
        double acc = -diagonal_[i] * u[i];
        for (const auto& c : rows_[i]) acc += c.weight * u[c.neighbor];
        out[i] = acc;
    }
}

std::vector<double> GraphLaplacianOp::apply(std::span<const double> u) const {
    std::vector<double> out(vertex_count());
    apply(u, out);
    return out;
}

std::vector<double> GraphLaplacianOp::apply_squared(std::span<const double> u) const {
    return apply(apply(u));
}

bool GraphLaplacianOp::connected() const {
    const std::size_t n = vertex_count();
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& c : rows_[i]) {
            if (c.weight > 0.0) {
                adj[i].push_back(c.neighbor);
                adj[c.neighbor].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> queue{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!queue.empty()) {
        const std::uint32_t v = queue.back();
        queue.pop_back();
        for (std::uint32_t w : adj[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++visited;
                queue.push_back(w);
            }
        }
    }
    return visited == n;
}

GraphLaplacianOp central_difference_periodic(int n, double dx) {
    if (n < 2) throw std::invalid_argument("central_difference_periodic: need n >= 2");
    if (!(dx > 0.0)) throw std::invalid_argument("central_difference_periodic: dx must be > 0");
    const double w = 1.0 / (dx * dx);
    std::vector<std::vector<GraphLaplacianOp::Coupling>> rows(n);
    for (int i = 0; i < n; ++i) {
        const auto left = static_cast<std::uint32_t>((i + n - 1) % n);
        const auto right = static_cast<std::uint32_t>((i + 1) % n);
        rows[i] = {{left, w}, {right, w}};
    }
    return GraphLaplacianOp::conservative(std::move(rows));
}

GraphLaplacianOp central_difference_dirichlet(int n, double dx) {
    if (n < 2) throw std::invalid_argument("central_difference_dirichlet: need n >= 2");
    if (!(dx > 0.0)) throw std::invalid_argument("central_difference_dirichlet: dx must be > 0");
    const double w = 1.0 / (dx * dx);
    std::vector<std::vector<GraphLaplacianOp::Coupling>> rows(n);
    for (int i = 0; i < n; ++i) {
        if (i > 0) rows[i].push_back({static_cast<std::uint32_t>(i - 1), w});
        if (i < n - 1) rows[i].push_back({static_cast<std::uint32_t>(i + 1), w});
    }
    return GraphLaplacianOp(std::move(rows), std::vector<double>(n, 2.0 * w));
}

GraphLaplacianOp five_point_periodic(int n, double h) {
    if (n < 2) throw std::invalid_argument("five_point_periodic: need n >= 2");
    if (!(h > 0.0)) throw std::invalid_argument("five_point_periodic: h must be > 0");
    const double w = 1.0 / (h * h);
    const std::size_t total = static_cast<std::size_t>(n) * n;
    std::vector<std::vector<GraphLaplacianOp::Coupling>> rows(total);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            auto at = [n](int rr, int cc) {
                return static_cast<std::uint32_t>(((rr + n) % n) * n + ((cc + n) % n));
            };
            rows[at(r, c)] = {{at(r - 1, c), w}, {at(r + 1, c), w}, {at(r, c - 1), w},
                              {at(r, c + 1), w}};
        }
    }
    return GraphLaplacianOp::conservative(std::move(rows));
}

double resolvent_contraction_factor(const GraphLaplacianOp& op, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("resolvent: k must be > 0");
    const double kd = k * op.max_diagonal();
    return kd / (1.0 + kd);
}

std::vector<double> resolvent_solve(const GraphLaplacianOp& op, double k,
                                    std::span<const double> f) {
    const std::size_t n = op.vertex_count();
    if (f.size() != n) throw std::invalid_argument("resolvent_solve: size mismatch");
    const double theta = resolvent_contraction_factor(op, k);

    double fmax = 0.0;
    for (double x : f) fmax = std::max(fmax, std::abs(x));
    if (fmax == 0.0) return std::vector<double>(n, 0.0);

    // Since (I - k L)^{-1} is sup-norm nonexpansive, the solution error is
    // bounded by the residual sup norm, so the residual is the right stopping
    // quantity.  Its evaluation carries rounding noise of order
    // eps * (1 + k w_ii) * ||u||_inf, which sets the tolerance floor.
    const double kd = k * op.max_diagonal();
    const double tol =
        fmax * std::max(1e-12, 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + 2.0 * kd));
    // Half damping keeps every eigenvalue of the iteration in
    // [(1-theta)/2, (1+theta)/2]: strictly positive, so rounding cannot feed a
    // persistent alternating cycle, at the cost of a 2x slower constant mode.
    const double rate = 0.5 * (1.0 + theta);
    long cap = std::min<long>(
        std::max<long>(64, static_cast<long>(std::log(tol / (2.0 * fmax * (1.0 + 2.0 * kd))) /
                                             std::log(rate)) +
                               32),
        100000000L);

    // Extended-precision accumulation keeps the update's rounding noise at
    // the scale of the result instead of the much larger k w u intermediates,
    // which is what makes the tolerance above reachable for stiff k.
    std::vector<double> u(f.begin(), f.end());
    std::vector<double> v(n);
    for (long iter = 0; iter < cap; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            long double acc = f[i];
            for (const auto& c : op.couplings(i))
                acc += static_cast<long double>(k) * c.weight * u[c.neighbor];
            const long double jacobi =
                acc / (1.0L + static_cast<long double>(k) * op.diagonal(i));
            v[i] = static_cast<double>(0.5L * u[i] + 0.5L * jacobi);
        }
        u.swap(v);
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            long double acc =
                f[i] - (1.0L + static_cast<long double>(k) * op.diagonal(i)) * u[i];
            for (const auto& c : op.couplings(i))
                acc += static_cast<long double>(k) * c.weight * u[c.neighbor];
            residual = std::max(residual, std::abs(static_cast<double>(acc)));
        }
        if (residual <= tol) return u;
    }
    throw std::runtime_error("resolvent_solve: contraction iteration did not converge");
}

GraphLaplacianOp read_edge_list(std::istream& in) {
    std::size_t n = 0;
    int flag = -1;
    if (!(in >> n >> flag) || n == 0 || (flag != 0 && flag != 1))
        throw std::runtime_error("edge list: bad header, expected 'n conservative_flag'");
    if (n > std::numeric_limits<std::uint32_t>::max())
        throw std::runtime_error("edge list: too many vertices");

    std::vector<std::vector<GraphLaplacianOp::Coupling>> rows(n);
    std::vector<double> diag(n, 0.0);
    std::uint64_t i = 0, j = 0;
    double w = 0.0;
    while (in >> i >> j >> w) {
        if (i >= n || j >= n) throw std::runtime_error("edge list: vertex index out of range");
        if (!std::isfinite(w) || w < 0.0)
            throw std::runtime_error("edge list: weights must be finite and >= 0");
        if (i == j) {
            if (flag == 1)
                throw std::runtime_error(
                    "edge list: diagonal entries are implied by conservative_flag=1");
            diag[i] = w;
        } else {
            rows[i].push_back({static_cast<std::uint32_t>(j), w});
            rows[j].push_back({static_cast<std::uint32_t>(i), w});
        }
    }
    if (!in.eof()) throw std::runtime_error("edge list: malformed line");

    if (flag == 1) return GraphLaplacianOp::conservative(std::move(rows));
    return GraphLaplacianOp(std::move(rows), std::move(diag));
}

GraphLaplacianOp read_edge_list_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("edge list: cannot open " + path.string());
    return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const GraphLaplacianOp& op) {
    if (!op.symmetric())
        throw std::invalid_argument("write_edge_list: only symmetric operators are supported");
    const std::size_t n = op.vertex_count();
    char buf[64];
    out << n << ' ' << (op.conservative() ? 1 : 0) << '\n';
    if (!op.conservative()) {
        for (std::size_t i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", op.diagonal(i));
            out << i << ' ' << i << ' ' << buf << '\n';
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& c : op.couplings(i)) {
            if (c.neighbor <= i) continue;
            std::snprintf(buf, sizeof buf, "%.17g", c.weight);
            out << i << ' ' << c.neighbor << ' ' << buf << '\n';
        }
    }
    if (!out) throw std::runtime_error("edge list: write failed");
}

} // namespace chstab
