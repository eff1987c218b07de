#include "chstab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "chstab/config.hpp"
#include "chstab/graph_laplacian.hpp"
#include "chstab/initial_data.hpp"
#include "chstab/resolvent_kernel.hpp"
#include "chstab/run.hpp"
#include "chstab/snapshot_io.hpp"
#include "chstab/stability.hpp"

namespace chstab::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNotAdmissible = 2;
constexpr int kCeilingViolated = 3;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::unique_ptr<SchemeBackend> make_backend(const RunConfig& c, const SchemeParams& p) {
    const TorusGrid grid(c.dim, c.points_per_dim);
    if (c.scheme == SchemeKind::spectral) return std::make_unique<SpectralBackend>(p, grid);
    if (c.bc == BoundaryKind::dirichlet)
        return std::make_unique<GraphBackend>(
            p, grid, central_difference_dirichlet(c.points_per_dim, grid.spacing()));
    return std::make_unique<GraphBackend>(p, grid);
}

Field load_initial(const RunConfig& c, const TorusGrid& grid) {
    switch (c.initial) {
        case InitialKind::random: return random_initial(grid, c.seed);
        case InitialKind::cosine: return cosine_initial(grid);
        case InitialKind::file: break;
    }
    Field u = read_snapshot_file(c.initial_file);
    if (u.grid() != grid)
        throw std::invalid_argument("initial file " + c.initial_file +
                                    " does not match the configured grid");
    return u;
}

int run_certify(std::ostream& out, double nu, double tau, double a,
                std::optional<double> linf) {
    const SchemeParams p(nu, tau, a);
    const StabilityCertificate cert = certify(p, linf.value_or(0.0));
    out << "critical_A = " << fmt(cert.critical) << '\n';
    out << "beta = " << fmt(cert.beta) << '\n';
    out << "window_lower = " << fmt(cert.window_lower) << '\n';
    out << "window_upper = " << fmt(cert.window_upper) << '\n';
    out << "certified_bound = " << fmt(cert.bound) << '\n';
    if (linf) out << "initial_linf = " << fmt(*linf) << '\n';
    if (cert.admissible) {
        out << "verdict = admissible\n";
        return kOk;
    }
    out << "verdict = not admissible:";
    if (a < cert.critical) out << " stabilization below critical";
    if (linf && *linf > cert.bound) out << " initial sup norm above the certified bound";
    out << '\n';
    return kNotAdmissible;
}

int run_simulate(std::ostream& out, std::ostream& err, const std::string& config_path,
                 const std::vector<std::string>& overrides, bool invariant_path, bool dealias) {
    const RunConfig c = parse_run_config_file(config_path, overrides);
    if (dealias && c.scheme != SchemeKind::spectral)
        throw std::invalid_argument("--dealias applies only to the spectral scheme");

    const SchemeParams p(c.nu, c.tau, c.stabilization);
    const TorusGrid grid(c.dim, c.points_per_dim);
    std::unique_ptr<SchemeBackend> backend =
        dealias ? std::make_unique<SpectralBackend>(p, grid, true) : make_backend(c, p);
    const Field u0 = load_initial(c, grid);

    const StabilityCertificate cert = certify(p, norms_and_mean(u0).linf);

    const fs::path dir(c.output_dir);
    fs::create_directories(dir);

    RunOptions opt;
    opt.steps = c.steps;
    opt.use_invariant_path = invariant_path;
    if (cert.admissible) opt.linf_bound = cert.bound;
    opt.snapshot_stride = c.snapshot_stride;
    if (c.snapshot_stride > 0)
        opt.snapshot_sink = [&dir](long step, const Field& u) {
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%06ld.chf", step);
            write_snapshot_file(dir / name, u);
        };

    const RunResult result = run_scheme(*backend, u0, opt);

    const fs::path csv_path = dir / "energy.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    write_energy_csv(csv, result.history);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());

    const EnergyReport& last = result.history.back();
    out << "steps = " << last.step << '\n';
    out << "final_time = " << fmt(last.time) << '\n';
    out << "final_energy = " << fmt(last.energy) << '\n';
    out << "final_linf = " << fmt(last.linf) << '\n';
    out << "final_mean = " << fmt(last.mean) << '\n';
    out << "max_linf = " << fmt(result.max_linf) << '\n';
    out << "energy_monotone = " << (energy_monotone(result.history) ? "yes" : "no") << '\n';
    out << "certificate = "
        << (cert.admissible ? "admissible, bound " + fmt(cert.bound) : std::string("not admissible"))
        << '\n';
    out << "energy_csv = " << csv_path.string() << '\n';

    if (cert.admissible && result.bound_violated) {
        err << "alarm: certified sup-norm bound " << fmt(cert.bound)
            << " exceeded at runtime (max " << fmt(result.max_linf) << ")\n";
        return kCeilingViolated;
    }
    return kOk;
}

int run_sweep(std::ostream& out, std::ostream& err, const std::string& config_path,
              const std::vector<std::string>& overrides, const std::string& a_list,
              double tau_lo, double tau_hi, double rel_tol, const std::string& output_file) {
    const RunConfig c = parse_run_config_file(config_path, overrides);

    std::vector<double> a_values;
    std::stringstream items(a_list);
    std::string item;
    while (std::getline(items, item, ',')) {
        std::size_t used = 0;
        const double a = std::stod(item, &used);
        if (used != item.size() || !(a >= 0.0))
            throw std::invalid_argument("sweep: bad stabilization value \"" + item + "\"");
        a_values.push_back(a);
    }
    if (a_values.empty()) throw std::invalid_argument("sweep: empty stabilization list");

    const TorusGrid grid(c.dim, c.points_per_dim);
    const Field u0 = load_initial(c, grid);

    std::string csv = "A,tau_c\n";
    bool all_bracketed = true;
    for (double a : a_values) {
        auto factory = [&](double tau) {
            return make_backend(c, SchemeParams(c.nu, tau, a));
        };
        const CriticalTauResult r =
            find_critical_tau(factory, u0, c.steps, tau_lo, tau_hi, rel_tol);
        csv += fmt(a) + "," + (r.bracketed ? fmt(r.tau_critical) : std::string("nan")) + "\n";
        if (!r.bracketed) {
            all_bracketed = false;
            err << "sweep: decay predicate not bracketed on [" << fmt(tau_lo) << ", "
                << fmt(tau_hi) << "] for A = " << fmt(a) << '\n';
        }
    }

    out << csv;
    if (!output_file.empty()) {
        std::ofstream f(output_file, std::ios::binary);
        f << csv;
        if (!f) throw std::runtime_error("cannot write " + output_file);
    }
    return all_bracketed ? kOk : kUsage;
}

int run_kernel(std::ostream& out, int n, double theta) {
    const ResolventKernel kernel = kernel_1d_periodic(n, theta);
    out << "j,c\n";
    for (int j = 0; j < n; ++j) out << j << ',' << fmt(kernel.coefficients[j]) << '\n';
    out << "epsilon_sharp," << fmt(kernel.epsilon_sharp) << '\n';
    out << "epsilon_perturbation," << fmt(kernel.epsilon_perturbation) << '\n';
    return kOk;
}

int run_resolvent(std::ostream& out, std::ostream& err, const std::string& operator_file,
                  double k) {
    const GraphLaplacianOp op = read_edge_list_file(operator_file);
    const GeneralKernel kernel = general_kernel(op, k);
    if (kernel.degenerate) {
        err << "resolvent: operator is disconnected, the mean-zero improvement is vacuous\n";
        return kUsage;
    }
    out << "vertex_count," << kernel.vertex_count << '\n';
    out << "theta," << fmt(kernel.theta) << '\n';
    out << "epsilon0," << fmt(kernel.epsilon0) << '\n';
    out << "epsilon_perturbation," << fmt(kernel.epsilon) << '\n';
    return kOk;
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app("Stabilized semi-implicit interface-dynamics solver");
    app.require_subcommand(1);
    int rc = kOk;

    double nu = 0.0, tau = 0.0, a = 0.0;
    double linf_value = 0.0;
    CLI::App* certify_cmd =
        app.add_subcommand("certify", "Check the sup-norm certificate for (nu, tau, A)");
    certify_cmd->add_option("--nu", nu, "interface coefficient")->required();
    certify_cmd->add_option("--tau", tau, "time step")->required();
    certify_cmd->add_option("--A", a, "stabilization coefficient")->required();
    CLI::Option* linf_opt =
        certify_cmd->add_option("--linf", linf_value, "sup norm of the initial data");
    certify_cmd->callback([&] {
        rc = run_certify(out, nu, tau, a,
                         linf_opt->count() ? std::optional<double>(linf_value) : std::nullopt);
    });

    std::string config_path;
    std::vector<std::string> overrides;
    bool invariant_path = false, dealias = false;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Run a configured simulation and write its audit trail");
    simulate_cmd->add_option("--config", config_path, "run configuration file")->required();
    simulate_cmd->add_option("--set", overrides, "override a config key (key=value)");
    simulate_cmd->add_flag("--invariant-path", invariant_path,
                           "advance through the certified two-resolvent route");
    simulate_cmd->add_flag("--dealias", dealias, "filter the cubic term (spectral scheme only)");
    simulate_cmd->callback([&] {
        rc = run_simulate(out, err, config_path, overrides, invariant_path, dealias);
    });

    std::string sweep_config, a_list, sweep_output;
    double tau_lo = 0.0, tau_hi = 0.0, rel_tol = 0.02;
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Find the largest monotone-decay step size for each stabilization value");
    sweep_cmd->add_option("--config", sweep_config, "run configuration file")->required();
    sweep_cmd->add_option("--set", overrides, "override a config key (key=value)");
    sweep_cmd->add_option("--A-list", a_list, "comma-separated stabilization values")->required();
    sweep_cmd->add_option("--tau-lo", tau_lo, "step size that must decay")->required();
    sweep_cmd->add_option("--tau-hi", tau_hi, "step size that must fail")->required();
    sweep_cmd->add_option("--rel-tol", rel_tol, "relative width of the final bracket");
    sweep_cmd->add_option("--output", sweep_output, "also write the CSV to this file");
    sweep_cmd->callback([&] {
        rc = run_sweep(out, err, sweep_config, overrides, a_list, tau_lo, tau_hi, rel_tol,
                       sweep_output);
    });

    int kernel_n = 0;
    double kernel_theta = 0.0;
    CLI::App* kernel_cmd = app.add_subcommand(
        "kernel", "Resolvent kernel and contraction constants of the periodic chain");
    kernel_cmd->add_option("--N", kernel_n, "number of vertices")->required();
    kernel_cmd->add_option("--theta", kernel_theta, "contraction parameter in (0, 1)")->required();
    kernel_cmd->callback([&] {
        if (kernel_n < 2) throw CLI::ValidationError("kernel", "--N must be at least 2");
        if (!(kernel_theta > 0.0) || !(kernel_theta < 1.0))
            throw CLI::ValidationError("kernel", "--theta must lie in (0, 1)");
        rc = run_kernel(out, kernel_n, kernel_theta);
    });

    std::string operator_file;
    double resolvent_k = 0.0;
    CLI::App* resolvent_cmd = app.add_subcommand(
        "resolvent", "Mean-zero contraction constants of a general operator");
    resolvent_cmd->add_option("--operator", operator_file, "edge-list operator file")->required();
    resolvent_cmd->add_option("--k", resolvent_k, "resolvent scale, > 0")->required();
    resolvent_cmd->callback([&] { rc = run_resolvent(out, err, operator_file, resolvent_k); });

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return rc;
}

} // namespace chstab::cli
