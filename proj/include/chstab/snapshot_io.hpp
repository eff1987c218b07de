#pragma once

#include <filesystem>
#include <iosfwd>

#include "chstab/grid.hpp"

namespace chstab {

/// Binary snapshot format, little-endian:
///   bytes 0..3   magic "CHF1"
///   byte  4      dimension (1..3)
///   next         one u64 extent per dimension
///   rest         f64 samples, row-major
void write_snapshot(std::ostream& out, const Field& u);
Field read_snapshot(std::istream& in);

void write_snapshot_file(const std::filesystem::path& path, const Field& u);
Field read_snapshot_file(const std::filesystem::path& path);

} // namespace chstab
