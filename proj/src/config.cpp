#include "chstab/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace chstab {

namespace {

std::string trim(const std::string& s) {
    const std::size_t lo = s.find_first_not_of(" \t\r");
    if (lo == std::string::npos) return {};
    const std::size_t hi = s.find_last_not_of(" \t\r");
    return s.substr(lo, hi - lo + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config: " + key + ": " + why);
}

double parse_positive_real(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE) fail(key, "not a number");
    if (!(x > 0.0) || !std::isfinite(x)) fail(key, "must be a positive finite number");
    return x;
}

long parse_count(const std::string& key, const std::string& value, long lo) {
    errno = 0;
    char* end = nullptr;
    const long x = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE) fail(key, "not an integer");
    if (x < lo) fail(key, "must be >= " + std::to_string(lo));
    return x;
}

struct Tracker {
    bool nu = false, tau = false, a = false, steps = false;
};

void assign(RunConfig& c, Tracker& seen, const std::string& key, const std::string& value) {
    if (key == "scheme") {
        if (value == "spectral")
            c.scheme = SchemeKind::spectral;
        else if (value == "graph")
            c.scheme = SchemeKind::graph;
        else
            fail(key, "expected spectral or graph");
    } else if (key == "dim") {
        c.dim = static_cast<int>(parse_count(key, value, 1));
        if (c.dim > 3) fail(key, "must be 1, 2, or 3");
    } else if (key == "points_per_dim") {
        c.points_per_dim = static_cast<int>(parse_count(key, value, 2));
    } else if (key == "bc") {
        if (value == "periodic")
            c.bc = BoundaryKind::periodic;
        else if (value == "dirichlet")
            c.bc = BoundaryKind::dirichlet;
        else
            fail(key, "expected periodic or dirichlet");
    } else if (key == "nu") {
        c.nu = parse_positive_real(key, value);
        seen.nu = true;
    } else if (key == "tau") {
        c.tau = parse_positive_real(key, value);
        seen.tau = true;
    } else if (key == "A") {
        errno = 0;
        char* end = nullptr;
        const double x = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0' || errno == ERANGE) fail(key, "not a number");
        if (!(x >= 0.0) || !std::isfinite(x)) fail(key, "must be >= 0");
        c.stabilization = x;
        seen.a = true;
    } else if (key == "steps") {
        c.steps = parse_count(key, value, 0);
        seen.steps = true;
    } else if (key == "seed") {
        errno = 0;
        char* end = nullptr;
        const unsigned long long x = std::strtoull(value.c_str(), &end, 10);
        if (end == value.c_str() || *end != '\0' || errno == ERANGE) fail(key, "not an integer");
        c.seed = static_cast<std::uint64_t>(x);
    } else if (key == "initial") {
        if (value == "random")
            c.initial = InitialKind::random;
        else if (value == "cosine")
            c.initial = InitialKind::cosine;
        else if (value.rfind("file:", 0) == 0 && value.size() > 5) {
            c.initial = InitialKind::file;
            c.initial_file = value.substr(5);
        } else
            fail(key, "expected random, cosine, or file:<path>");
    } else if (key == "snapshot_stride") {
        c.snapshot_stride = parse_count(key, value, 0);
    } else if (key == "output_dir") {
        if (value.empty()) fail(key, "must not be empty");
        c.output_dir = value;
    } else {
        fail(key, "unknown key");
    }
}

void assign_pair(RunConfig& c, Tracker& seen, const std::string& text, const std::string& where) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("config: " + where + ": expected key = value, got \"" + text +
                                    "\"");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config: " + where + ": empty key");
    if (value.empty()) fail(key, "empty value");
    assign(c, seen, key, value);
}

} // namespace

RunConfig parse_run_config(std::istream& in, std::span<const std::string> overrides) {
    RunConfig c;
    Tracker seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        assign_pair(c, seen, t, "line " + std::to_string(lineno));
    }
    for (const std::string& o : overrides) assign_pair(c, seen, o, "override");

    if (!seen.nu) fail("nu", "required key missing");
    if (!seen.tau) fail("tau", "required key missing");
    if (!seen.a) fail("A", "required key missing");
    if (!seen.steps) fail("steps", "required key missing");
    if (c.bc == BoundaryKind::dirichlet && (c.scheme != SchemeKind::graph || c.dim != 1))
        fail("bc", "dirichlet is only available for 1d graph runs");
    if (c.scheme == SchemeKind::graph && c.dim == 3)
        fail("scheme", "the graph scheme has no built-in 3d stencil");
    return c;
}

RunConfig parse_run_config_file(const std::filesystem::path& path,
                                std::span<const std::string> overrides) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    return parse_run_config(in, overrides);
}

} // namespace chstab
