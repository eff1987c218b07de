#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

namespace chstab {

enum class SchemeKind { spectral, graph };
enum class BoundaryKind { periodic, dirichlet };
enum class InitialKind { random, cosine, file };

/// A full run description, read from a key = value text file.
/// Grammar: one "key = value" pair per line; blank lines and lines starting
/// with '#' are skipped; later assignments win.  Unknown keys are an error.
/// nu, tau, A and steps have no defaults and must be assigned.
///
/// Keys: scheme (spectral | graph), dim, points_per_dim,
/// bc (periodic | dirichlet; dirichlet only for 1d graph runs), nu, tau, A,
/// steps, seed, initial (random | cosine | file:<path>), snapshot_stride,
/// output_dir.
struct RunConfig {
    SchemeKind scheme = SchemeKind::spectral;
    int dim = 1;
    int points_per_dim = 128;
    BoundaryKind bc = BoundaryKind::periodic;
    double nu = 0.0;
    double tau = 0.0;
    double stabilization = 0.0;
    long steps = 0;
    std::uint64_t seed = 1;
    InitialKind initial = InitialKind::random;
    std::string initial_file; // set when initial == file
    long snapshot_stride = 0;
    std::string output_dir = ".";
};

/// Parse a config stream, then apply "key=value" overrides in order.
/// Throws std::invalid_argument with a line- or key-specific message on any
/// malformed input, unknown key, missing required key, or inconsistent
/// combination.
RunConfig parse_run_config(std::istream& in, std::span<const std::string> overrides = {});

RunConfig parse_run_config_file(const std::filesystem::path& path,
                                std::span<const std::string> overrides = {});

} // namespace chstab
