#include "chstab/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace chstab {

namespace {

constexpr char kMagic[4] = {'C', 'H', 'F', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& out, double x) {
    put_u64(out, std::bit_cast<std::uint64_t>(x));
}

double get_f64(std::istream& in) {
    return std::bit_cast<double>(get_u64(in));
}

} // namespace

void write_snapshot(std::ostream& out, const Field& u) {
    out.write(kMagic, 4);
    out.put(static_cast<char>(u.grid().dim()));
    for (int d = 0; d < u.grid().dim(); ++d)
        put_u64(out, static_cast<std::uint64_t>(u.grid().points_per_dim()));
    for (double x : u.values()) put_f64(out, x);
    if (!out) throw std::runtime_error("snapshot: write failed");
}

Field read_snapshot(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("snapshot: bad magic, not a CHF1 file");
    const int dim = in.get();
    if (dim < 1 || dim > 3) throw std::runtime_error("snapshot: unsupported dimension");
    std::uint64_t extent0 = get_u64(in);
    for (int d = 1; d < dim; ++d) {
        if (get_u64(in) != extent0)
            throw std::runtime_error("snapshot: extents must match along all axes");
    }
    if (!in || extent0 < 2 || extent0 > std::numeric_limits<int>::max())
        throw std::runtime_error("snapshot: bad extent");
    const TorusGrid grid(dim, static_cast<int>(extent0));
    std::vector<double> values(grid.point_count());
    for (double& x : values) x = get_f64(in);
    if (!in) throw std::runtime_error("snapshot: truncated data section");
    return Field(grid, std::move(values));
}

void write_snapshot_file(const std::filesystem::path& path, const Field& u) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("snapshot: cannot open " + path.string());
    write_snapshot(out, u);
}

Field read_snapshot_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path.string());
    return read_snapshot(in);
}

} // namespace chstab
