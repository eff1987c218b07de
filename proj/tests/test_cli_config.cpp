#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "chstab/cli.hpp"
#include "chstab/config.hpp"
#include "chstab/initial_data.hpp"
#include "chstab/resolvent_kernel.hpp"
#include "chstab/run.hpp"
#include "chstab/snapshot_io.hpp"
#include "chstab/stability.hpp"

using namespace chstab;
namespace fs = std::filesystem;

namespace {

RunConfig parse_text(const std::string& text, std::vector<std::string> overrides = {}) {
    std::istringstream in(text);
    return parse_run_config(in, overrides);
}

// Returns the exception message; fails the test if nothing is thrown.
std::string parse_failure(const std::string& text, std::vector<std::string> overrides = {}) {
    try {
        parse_text(text, std::move(overrides));
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    FAIL("expected the config parser to reject: ", text);
    return {};
}

struct CliResult {
    int rc;
    std::string out;
    std::string err;
};

CliResult call_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int rc = cli::run(std::move(args), out, err);
    return {rc, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t nl = s.find('\n', pos);
        lines.push_back(s.substr(pos, nl - pos));
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return lines;
}

// Value of a "key = number" line in subcommand output.
double value_after(const std::string& text, const std::string& key) {
    const std::string prefix = key + " = ";
    for (const std::string& line : split_lines(text))
        if (line.rfind(prefix, 0) == 0) return std::strtod(line.c_str() + prefix.size(), nullptr);
    FAIL("missing output line: ", prefix);
    return 0.0;
}

// Second cell of a "label,number" CSV row.
double csv_value(const std::string& text, const std::string& label) {
    const std::string prefix = label + ",";
    for (const std::string& line : split_lines(text))
        if (line.rfind(prefix, 0) == 0) return std::strtod(line.c_str() + prefix.size(), nullptr);
    FAIL("missing csv row: ", prefix);
    return 0.0;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "chstab_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    REQUIRE(static_cast<bool>(f));
}

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(static_cast<bool>(f));
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

const std::string kBaseConfig =
    "scheme = spectral\n"
    "dim = 1\n"
    "points_per_dim = 64\n"
    "nu = 0.001\n"
    "tau = 0.03\n"
    "A = 3.2\n"
    "steps = 6\n"
    "seed = 9\n";

} // namespace

TEST_CASE("config parser fills every field and later assignments win") {
    const RunConfig c = parse_text(
        "# run profile\n"
        "scheme = graph\n"
        "\n"
        "dim=2\n"
        "  nu = 0.003\t\n"
        "tau = 0.05\n"
        "A = 3.2\n"
        "steps = 12\n"
        "nu = 0.001\n"
        "seed = 77\n"
        "initial = file:/data/u0.chf\n"
        "snapshot_stride = 4\n"
        "output_dir = out/run1\n"
        "points_per_dim = 48\n");
    CHECK(c.scheme == SchemeKind::graph);
    CHECK(c.dim == 2);
    CHECK(c.points_per_dim == 48);
    CHECK(c.bc == BoundaryKind::periodic);
    CHECK(c.nu == 0.001);
    CHECK(c.tau == 0.05);
    CHECK(c.stabilization == 3.2);
    CHECK(c.steps == 12);
    CHECK(c.seed == 77);
    CHECK(c.initial == InitialKind::file);
    CHECK(c.initial_file == "/data/u0.chf");
    CHECK(c.snapshot_stride == 4);
    CHECK(c.output_dir == "out/run1");
}

TEST_CASE("config parser defaults cover everything except the four required keys") {
    const RunConfig c = parse_text("nu = 0.1\ntau = 0.01\nA = 0\nsteps = 3\n");
    CHECK(c.scheme == SchemeKind::spectral);
    CHECK(c.dim == 1);
    CHECK(c.points_per_dim == 128);
    CHECK(c.bc == BoundaryKind::periodic);
    CHECK(c.stabilization == 0.0);
    CHECK(c.seed == 1);
    CHECK(c.initial == InitialKind::random);
    CHECK(c.snapshot_stride == 0);
    CHECK(c.output_dir == ".");
}

TEST_CASE("config parser reports which required key is missing") {
    CHECK(parse_failure("tau = 0.01\nA = 1\nsteps = 3\n").find("nu: required") !=
          std::string::npos);
    CHECK(parse_failure("nu = 0.1\nA = 1\nsteps = 3\n").find("tau: required") !=
          std::string::npos);
    CHECK(parse_failure("nu = 0.1\ntau = 0.01\nsteps = 3\n").find("A: required") !=
          std::string::npos);
    CHECK(parse_failure("nu = 0.1\ntau = 0.01\nA = 1\n").find("steps: required") !=
          std::string::npos);
}

TEST_CASE("config parser rejects malformed lines and out-of-range values") {
    auto rejects = [](const std::string& line, const std::string& why) {
        const std::string msg = parse_failure(line + "\n");
        CAPTURE(line);
        CAPTURE(msg);
        CHECK(msg.find(why) != std::string::npos);
    };
    rejects("scheme = foo", "expected spectral or graph");
    rejects("dim = 0", "must be >= 1");
    rejects("dim = 4", "must be 1, 2, or 3");
    rejects("points_per_dim = 1", "must be >= 2");
    rejects("nu = -0.5", "positive");
    rejects("nu = abc", "not a number");
    rejects("tau = 0", "positive");
    rejects("A = -1", ">= 0");
    rejects("steps = -1", "must be >= 0");
    rejects("steps = 2.5", "not an integer");
    rejects("seed = 12x", "not an integer");
    rejects("bc = open", "expected periodic or dirichlet");
    rejects("initial = neither", "expected random, cosine, or file:<path>");
    rejects("initial = file:", "expected random, cosine, or file:<path>");
    rejects("snapshot_stride = -2", "must be >= 0");
    rejects("output_dir =", "empty value");
    rejects("flux = 3", "unknown key");
    rejects("a = 1", "unknown key"); // keys are case sensitive
    rejects("justtext", "expected key = value");
    rejects("= 5", "empty key");
}

TEST_CASE("config parser validates scheme, dimension and boundary combinations") {
    const std::string base = "nu = 0.1\ntau = 0.01\nA = 1\nsteps = 3\n";
    const RunConfig ok = parse_text(base + "scheme = graph\nbc = dirichlet\n");
    CHECK(ok.bc == BoundaryKind::dirichlet);

    CHECK(parse_failure(base + "bc = dirichlet\n").find("only available for 1d graph") !=
          std::string::npos);
    CHECK(parse_failure(base + "scheme = graph\ndim = 2\nbc = dirichlet\n")
              .find("only available for 1d graph") != std::string::npos);
    CHECK(parse_failure(base + "scheme = graph\ndim = 3\n").find("no built-in 3d stencil") !=
          std::string::npos);
}

TEST_CASE("config overrides apply after the file and may supply required keys") {
    const RunConfig c =
        parse_text("nu = 0.1\ntau = 0.01\nA = 1\n", {"steps=7", "tau=0.25", "seed = 9"});
    CHECK(c.steps == 7);
    CHECK(c.tau == 0.25);
    CHECK(c.seed == 9);
    CHECK(c.nu == 0.1);

    CHECK(parse_failure("nu = 0.1\ntau = 0.01\nA = 1\nsteps = 2\n", {"steps"})
              .find("override: expected key = value") != std::string::npos);
    CHECK(parse_failure("nu = 0.1\ntau = 0.01\nA = 1\nsteps = 2\n", {"flux=1"})
              .find("unknown key") != std::string::npos);
}

TEST_CASE("config files are read from disk and missing paths are reported") {
    const fs::path dir = fresh_dir("config_file");
    write_text(dir / "run.cfg", kBaseConfig);
    const RunConfig c = parse_run_config_file(dir / "run.cfg");
    CHECK(c.points_per_dim == 64);
    CHECK(c.seed == 9);

    CHECK_THROWS_AS((void)parse_run_config_file(dir / "absent.cfg"), std::invalid_argument);
}

TEST_CASE("splitmix64 reproduces the published reference sequence") {
    // Reference outputs of the Steele-Lea-Flood generator for three seeds,
    // computed independently with 64-bit modular arithmetic.
    const std::uint64_t expect0[4] = {0xe220a8397b1dcdafull, 0x6e789e6aa1b965f4ull,
                                      0x06c45d188009454full, 0xf88bb8a8724c81ecull};
    const std::uint64_t expect1[4] = {0x910a2dec89025cc1ull, 0xbeeb8da1658eec67ull,
                                      0xf893a2eefb32555eull, 0x71c18690ee42c90bull};
    const std::uint64_t expectBig[4] = {0x157a3807a48faa9dull, 0xd573529b34a1d093ull,
                                        0x2f90b72e996dccbeull, 0xa2d419334c4667ecull};
    SplitMix64 r0(0), r1(1), rb(0x123456789abcdefull);
    for (int i = 0; i < 4; ++i) {
        CHECK(r0.next() == expect0[i]);
        CHECK(r1.next() == expect1[i]);
        CHECK(rb.next() == expectBig[i]);
    }

    SplitMix64 r42(42);
    CHECK(r42.uniform01() == 0.7415648787718233);
    CHECK(r42.uniform01() == 0.1599103928769201);

    SplitMix64 range(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = range.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("random initial data is seeded, mean-free and amplitude-bounded") {
    const TorusGrid grid(1, 64);
    const Field a = random_initial(grid, 5, 0.1);
    const Field b = random_initial(grid, 5, 0.1);
    const Field c = random_initial(grid, 6, 0.1);

    bool same = true, differs = false;
    for (std::size_t i = 0; i < grid.point_count(); ++i) {
        same = same && a.values()[i] == b.values()[i];
        differs = differs || a.values()[i] != c.values()[i];
    }
    CHECK(same);
    CHECK(differs);

    const FieldStats stats = norms_and_mean(a);
    CHECK(std::abs(stats.mean) <= 1e-15);
    CHECK(stats.linf <= 0.2);
    CHECK(stats.linf >= 0.03);

    // Pin the construction: one uniform draw per point in row-major order,
    // mapped to [-amp, amp], then recentered.
    SplitMix64 rng(5);
    std::vector<double> manual(grid.point_count());
    for (double& x : manual) x = 0.1 * (2.0 * rng.uniform01() - 1.0);
    long double sum = 0.0L;
    for (double x : manual) sum += x;
    const double mean = static_cast<double>(sum / manual.size());
    for (std::size_t i = 0; i < manual.size(); ++i)
        CHECK(std::abs(a.values()[i] - (manual[i] - mean)) <= 1e-15);

    CHECK_THROWS_AS((void)random_initial(grid, 5, 0.0), std::invalid_argument);
}

TEST_CASE("cosine initial data varies along the first axis only") {
    const TorusGrid g1(1, 8);
    const Field u1 = cosine_initial(g1, 0.5);
    for (int i = 0; i < 8; ++i) CHECK(u1.values()[i] == 0.5 * std::cos(g1.coordinate(i)));

    const TorusGrid g2(2, 4);
    const Field u2 = cosine_initial(g2, 0.25);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(u2.values()[static_cast<std::size_t>(i) * 4 + j] ==
                  0.25 * std::cos(g2.coordinate(i)));
}

TEST_CASE("certify subcommand prints the certificate and sets the exit code") {
    const CliResult ok =
        call_cli({"certify", "--nu", "0.001", "--tau", "0.03", "--A", "3.05", "--linf", "1.0"});
    CHECK(ok.rc == 0);
    CHECK(ok.err.empty());
    CHECK(ok.out.find("verdict = admissible") != std::string::npos);

    const StabilityCertificate cert = certify(SchemeParams(0.001, 0.03, 3.05), 1.0);
    CHECK(value_after(ok.out, "critical_A") == cert.critical);
    CHECK(value_after(ok.out, "beta") == cert.beta);
    CHECK(value_after(ok.out, "window_lower") == cert.window_lower);
    CHECK(value_after(ok.out, "window_upper") == cert.window_upper);
    CHECK(value_after(ok.out, "certified_bound") == cert.bound);
    CHECK(value_after(ok.out, "initial_linf") == 1.0);
    CHECK(value_after(ok.out, "critical_A") > 3.03);
    CHECK(value_after(ok.out, "critical_A") < 3.05);

    const CliResult low = call_cli({"certify", "--nu", "0.001", "--tau", "0.03", "--A", "2.9"});
    CHECK(low.rc == 2);
    CHECK(low.out.find("not admissible: stabilization below critical") != std::string::npos);

    const CliResult wide =
        call_cli({"certify", "--nu", "0.001", "--tau", "0.03", "--A", "3.2", "--linf", "5"});
    CHECK(wide.rc == 2);
    CHECK(wide.out.find("initial sup norm above the certified bound") != std::string::npos);

    CHECK(call_cli({"certify", "--nu", "0.001", "--A", "3.2"}).rc == 1);
}

TEST_CASE("top-level usage errors exit with 1 and help exits with 0") {
    CHECK(call_cli({}).rc == 1);
    CHECK(call_cli({"frobnicate"}).rc == 1);

    const CliResult help = call_cli({"--help"});
    CHECK(help.rc == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
    CHECK(help.out.find("certify") != std::string::npos);
}

TEST_CASE("kernel subcommand emits the three-point chain kernel exactly") {
    const CliResult r = call_cli({"kernel", "--N", "3", "--theta", "0.5"});
    CHECK(r.rc == 0);
    const std::vector<std::string> lines = split_lines(r.out);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "j,c");
    CHECK(csv_value(r.out, "0") == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(csv_value(r.out, "1") == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(csv_value(r.out, "2") == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(csv_value(r.out, "epsilon_sharp") == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(csv_value(r.out, "epsilon_perturbation") == doctest::Approx(0.4).epsilon(1e-15));

    CHECK(call_cli({"kernel", "--N", "3", "--theta", "1.5"}).rc == 1);
    CHECK(call_cli({"kernel", "--N", "1", "--theta", "0.5"}).rc == 1);
}

TEST_CASE("resolvent subcommand reads an edge list and reports the contraction") {
    const fs::path dir = fresh_dir("resolvent");
    write_text(dir / "triangle.txt", "3 1\n0 1 1\n1 2 1\n0 2 1\n");

    const CliResult r = call_cli({"resolvent", "--operator", (dir / "triangle.txt").string(),
                                  "--k", "0.7"});
    CHECK(r.rc == 0);
    CHECK(csv_value(r.out, "vertex_count") == 3.0);
    const double eps0 = csv_value(r.out, "epsilon0");
    const double eps = csv_value(r.out, "epsilon_perturbation");
    CHECK(eps0 > 0.0);
    CHECK(eps == doctest::Approx(1.0 - 3.0 * eps0).epsilon(1e-15));

    const GeneralKernel direct = general_kernel(read_edge_list_file(dir / "triangle.txt"), 0.7);
    CHECK(eps0 == direct.epsilon0);
    CHECK(csv_value(r.out, "theta") == direct.theta);

    write_text(dir / "split.txt", "4 1\n0 1 1\n2 3 1\n");
    const CliResult broken =
        call_cli({"resolvent", "--operator", (dir / "split.txt").string(), "--k", "0.7"});
    CHECK(broken.rc == 1);
    CHECK(broken.err.find("disconnected") != std::string::npos);

    CHECK(call_cli({"resolvent", "--operator", (dir / "absent.txt").string(), "--k", "0.7"}).rc ==
          1);
}

TEST_CASE("simulate subcommand writes the audit trail an external run reproduces") {
    const fs::path dir = fresh_dir("simulate");
    const std::string config =
        kBaseConfig + "snapshot_stride = 3\noutput_dir = " + (dir / "out").string() + "\n";
    write_text(dir / "run.cfg", config);

    const CliResult r = call_cli({"simulate", "--config", (dir / "run.cfg").string()});
    CHECK(r.rc == 0);
    CHECK(r.err.empty());
    CHECK(value_after(r.out, "steps") == 6.0);
    CHECK(value_after(r.out, "final_time") == 6 * 0.03);
    CHECK(r.out.find("energy_monotone = yes") != std::string::npos);
    CHECK(r.out.find("certificate = admissible, bound ") != std::string::npos);

    CHECK(fs::exists(dir / "out" / "snapshot_000000.chf"));
    CHECK(fs::exists(dir / "out" / "snapshot_000003.chf"));
    CHECK(fs::exists(dir / "out" / "snapshot_000006.chf"));
    CHECK_FALSE(fs::exists(dir / "out" / "snapshot_000001.chf"));

    const std::vector<std::string> csv = split_lines(read_text(dir / "out" / "energy.csv"));
    REQUIRE(csv.size() == 8);
    CHECK(csv[0] == "step,time,energy,linf,mean,increment_l2,grad_H_l2,dissipation_residual");

    // The written artifacts must match an independent in-process run bit for bit.
    const TorusGrid grid(1, 64);
    const SchemeParams p(0.001, 0.03, 3.2);
    const Field u0 = random_initial(grid, 9);
    SpectralBackend backend(p, grid);
    RunOptions opt;
    opt.steps = 6;
    opt.linf_bound = certify(p, norms_and_mean(u0).linf).bound;
    const RunResult direct = run_scheme(backend, u0, opt);

    const Field last = read_snapshot_file(dir / "out" / "snapshot_000006.chf");
    REQUIRE(last.grid() == grid);
    for (std::size_t i = 0; i < grid.point_count(); ++i)
        CHECK(last.values()[i] == direct.final_state.values()[i]);
    CHECK(value_after(r.out, "final_energy") == direct.history.back().energy);
    CHECK(value_after(r.out, "max_linf") == direct.max_linf);

    // Byte-identical on repetition.
    const std::string first_csv = read_text(dir / "out" / "energy.csv");
    const CliResult again = call_cli({"simulate", "--config", (dir / "run.cfg").string()});
    CHECK(again.rc == 0);
    CHECK(again.out == r.out);
    CHECK(read_text(dir / "out" / "energy.csv") == first_csv);
}

TEST_CASE("simulate holds a zero state at the uniform-well energy") {
    const fs::path dir = fresh_dir("simulate_zero");
    const TorusGrid grid(1, 32);
    write_snapshot_file(dir / "zero.chf", Field(grid, std::vector<double>(32, 0.0)));
    write_text(dir / "run.cfg",
               "points_per_dim = 32\nnu = 0.001\ntau = 0.03\nA = 3.2\nsteps = 4\n"
               "initial = file:" + (dir / "zero.chf").string() + "\n"
               "output_dir = " + (dir / "out").string() + "\n");

    const CliResult r = call_cli({"simulate", "--config", (dir / "run.cfg").string()});
    CHECK(r.rc == 0);
    CHECK(value_after(r.out, "final_linf") == 0.0);
    CHECK(value_after(r.out, "final_mean") == 0.0);
    CHECK(value_after(r.out, "final_energy") ==
          doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
}

TEST_CASE("simulate accepts overrides, flags and boundary variants") {
    const fs::path dir = fresh_dir("simulate_variants");
    write_text(dir / "run.cfg", kBaseConfig + "output_dir = " + (dir / "out").string() + "\n");

    const CliResult zero = call_cli(
        {"simulate", "--config", (dir / "run.cfg").string(), "--set", "steps=0"});
    CHECK(zero.rc == 0);
    CHECK(value_after(zero.out, "steps") == 0.0);
    CHECK(split_lines(read_text(dir / "out" / "energy.csv")).size() == 2);

    const CliResult certified = call_cli(
        {"simulate", "--config", (dir / "run.cfg").string(), "--invariant-path", "--dealias"});
    CHECK(certified.rc == 0);
    CHECK(certified.out.find("energy_monotone = yes") != std::string::npos);

    write_text(dir / "chain.cfg",
               "scheme = graph\nbc = dirichlet\npoints_per_dim = 32\n"
               "nu = 0.001\ntau = 0.03\nA = 3.2\nsteps = 3\nseed = 4\n"
               "output_dir = " + (dir / "chain").string() + "\n");
    const CliResult chain = call_cli({"simulate", "--config", (dir / "chain.cfg").string()});
    CHECK(chain.rc == 0);
    CHECK(fs::exists(dir / "chain" / "energy.csv"));

    const CliResult bad = call_cli(
        {"simulate", "--config", (dir / "chain.cfg").string(), "--dealias"});
    CHECK(bad.rc == 1);
    CHECK(bad.err.find("--dealias applies only to the spectral scheme") != std::string::npos);

    const CliResult unknown = call_cli(
        {"simulate", "--config", (dir / "run.cfg").string(), "--set", "flux=1"});
    CHECK(unknown.rc == 1);

    CHECK(call_cli({"simulate", "--config", (dir / "absent.cfg").string()}).rc == 1);
}

TEST_CASE("sweep subcommand brackets the decay threshold and flags failures") {
    const fs::path dir = fresh_dir("sweep");
    write_text(dir / "run.cfg",
               "points_per_dim = 32\nnu = 0.01\ntau = 0.01\nA = 0\nsteps = 40\nseed = 3\n");

    const std::vector<std::string> base = {"sweep", "--config", (dir / "run.cfg").string(),
                                           "--A-list", "0", "--tau-lo", "1e-3",
                                           "--tau-hi", "0.5"};
    std::vector<std::string> with_output = base;
    with_output.insert(with_output.end(), {"--output", (dir / "tau.csv").string()});

    const CliResult r = call_cli(with_output);
    CHECK(r.rc == 0);
    CHECK(r.err.empty());
    const std::vector<std::string> lines = split_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "A,tau_c");
    const double tau_c = csv_value(r.out, "0");
    CHECK(tau_c > 1e-3);
    CHECK(tau_c < 0.5);
    CHECK(read_text(dir / "tau.csv") == r.out);

    const CliResult again = call_cli(base);
    CHECK(again.out == r.out);

    // A strongly stabilized run decays on the whole window: no bracket.
    std::vector<std::string> stable = {"sweep", "--config", (dir / "run.cfg").string(),
                                       "--A-list", "5", "--tau-lo", "1e-3",
                                       "--tau-hi", "0.02"};
    const CliResult flat = call_cli(stable);
    CHECK(flat.rc == 1);
    CHECK(split_lines(flat.out)[1] == "5,nan");
    CHECK(flat.err.find("not bracketed") != std::string::npos);

    // A zero-width window degenerates into a point check; the decaying value
    // is echoed back.
    const CliResult point = call_cli({"sweep", "--config", (dir / "run.cfg").string(),
                                      "--A-list", "0", "--tau-lo", "1e-3", "--tau-hi", "1e-3"});
    CHECK(point.rc == 0);
    CHECK(split_lines(point.out)[1] == "0,0.001");

    CHECK(call_cli({"sweep", "--config", (dir / "run.cfg").string(), "--A-list", "0,x",
                    "--tau-lo", "1e-3", "--tau-hi", "0.5"})
              .rc == 1);
    CHECK(call_cli({"sweep", "--config", (dir / "run.cfg").string(), "--A-list", "0",
                    "--tau-lo", "0.5", "--tau-hi", "0.1"})
              .rc == 1);
}
