#include "chstab/initial_data.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace chstab {

Field random_initial(const TorusGrid& grid, std::uint64_t seed, double amplitude) {
    if (!(amplitude > 0.0)) throw std::invalid_argument("random_initial: amplitude must be > 0");
    SplitMix64 rng(seed);
    std::vector<double> v(grid.point_count());
    for (double& x : v) x = amplitude * (2.0 * rng.uniform01() - 1.0);
    const double mean = stable_sum(v) / static_cast<double>(v.size());
    for (double& x : v) x -= mean;
    return Field(grid, std::move(v));
}

Field cosine_initial(const TorusGrid& grid, double amplitude) {
    std::vector<double> v(grid.point_count());
    int idx[3];
    for (std::size_t i = 0; i < v.size(); ++i) {
        grid.unflatten(i, idx);
        v[i] = amplitude * std::cos(grid.coordinate(idx[0]));
    }
    return Field(grid, std::move(v));
}

} // namespace chstab
