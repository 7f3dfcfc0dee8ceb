#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "congest1d/eulerian.hpp"
#include "congest1d/harness.hpp"
#include "congest1d/metrics.hpp"
#include "congest1d/trajectory.hpp"

namespace fs = std::filesystem;
using namespace congest1d;

namespace {

struct CliOverrides {
    std::string config_file;
    std::string scenario;
    std::string rho0;
    std::string potential_kind;
    double center = 0.0, scale = 1.0, amplitude = 4.0, width = 1.0;
    std::string interaction = "";
    double interaction_amplitude = 0.5, interaction_width = 1.0;
    std::vector<int> n_values;
    std::vector<double> tau_values;
    double T = -1.0;
    int snapshots = -1;
    long long seed = -1;
    int workers = -1;
    std::string out_dir;
    bool no_strict_phi = false;
};

void add_common_options(CLI::App* app, CliOverrides& o) {
    app->add_option("--config", o.config_file, "JSON configuration file");
    app->add_option("--scenario", o.scenario, "built-in scenario (quadratic, double_well)");
    app->add_option("--rho0", o.rho0, "initial density: uniform:<a>,<b> or a JSON file");
    app->add_option("--potential", o.potential_kind,
                    "potential kind (quadratic, double_well_confined)");
    app->add_option("--center", o.center, "potential center (quadratic)");
    app->add_option("--scale", o.scale, "potential scale (quadratic)");
    app->add_option("--amplitude", o.amplitude, "double-well bump amplitude");
    app->add_option("--width", o.width, "double-well bump width");
    app->add_option("--interaction", o.interaction, "interaction kind (none, quadratic, gaussian-bump)");
    app->add_option("--n,-N", o.n_values, "particle counts");
    app->add_option("--tau", o.tau_values, "time steps");
    app->add_option("-T,--horizon", o.T, "time horizon");
    app->add_option("--snapshots", o.snapshots, "snapshot count for sup-in-time metrics");
    app->add_option("--seed", o.seed, "random seed");
    app->add_option("--workers", o.workers, "worker threads for sweeps");
    app->add_option("--out", o.out_dir, "output directory");
    app->add_flag("--no-strict-phi", o.no_strict_phi,
                  "skip the quadratic lower-bound requirement on the potential");
}

ExperimentConfig build_config(const CliOverrides& o) {
    ExperimentConfig cfg;
    if (!o.config_file.empty())
        cfg = config_from_json_file(o.config_file);
    else
        cfg = benchmark_config(o.scenario.empty() ? "quadratic" : o.scenario);
    if (o.no_strict_phi) cfg.strict_phi = false;
    if (!o.potential_kind.empty()) {
        if (o.potential_kind == "quadratic")
            cfg.potential = quadratic_potential(o.center, o.scale);
        else if (o.potential_kind == "double_well_confined")
            cfg.potential = double_well_potential(o.amplitude, o.width);
        else
            throw std::invalid_argument("unknown potential kind '" + o.potential_kind + "'");
        cfg.potential.strict = cfg.strict_phi;
    }
    if (!o.interaction.empty()) {
        if (o.interaction == "none")
            cfg.interaction.reset();
        else if (o.interaction == "quadratic")
            cfg.interaction = quadratic_kernel();
        else if (o.interaction == "gaussian-bump")
            cfg.interaction = gaussian_bump_kernel(o.interaction_amplitude, o.interaction_width);
        else
            throw std::invalid_argument("unknown interaction kind '" + o.interaction + "'");
    }
    if (!o.rho0.empty()) cfg.rho0 = density_from_spec(o.rho0);
    if (!o.n_values.empty()) cfg.n_values = o.n_values;
    if (!o.tau_values.empty()) cfg.tau_values = o.tau_values;
    if (o.T > 0.0) cfg.T = o.T;
    if (o.snapshots > 1) cfg.snapshots = o.snapshots;
    if (o.seed >= 0) cfg.seed = static_cast<unsigned>(o.seed);
    if (o.workers >= 0) cfg.workers = o.workers;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    return cfg;
}

fs::path ensure_out_dir(const ExperimentConfig& cfg) {
    fs::path dir = cfg.out_dir.empty() ? fs::path("out") : fs::path(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

Trajectory run_single(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const ParticleConfig X0 =
        sample_particles(quantile_of_density(cfg.rho0), cfg.n_values.front());
    return integrate(X0, cfg.potential, cfg.kernel(), cfg.tau_values.front(), cfg.T, cfg.jko);
}

int cmd_simulate(const ExperimentConfig& cfg) {
    const Trajectory traj = run_single(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    {
        std::ofstream csv(dir / "trajectory.csv");
        write_trajectory_csv(traj, csv);
    }
    {
        std::ofstream meta(dir / "metadata.json");
        meta << trajectory_metadata_json(traj) << '\n';
    }
    {
        std::ofstream est(dir / "estimates.json");
        est << estimate_suite_json(estimate_suite(traj, cfg.snapshots)) << '\n';
    }
    std::cout << trajectory_metadata_json(traj) << '\n';
    if (!traj.completed) {
        std::cerr << "run aborted at step " << traj.failed_step << ": " << traj.failure << '\n';
        return 1;
    }
    const EstimateSuite est = estimate_suite(traj, cfg.snapshots);
    return est.applicable && !est.all_pass ? 1 : 0;
}

int cmd_export_fields(const ExperimentConfig& cfg, int every) {
    if (every < 1) throw std::invalid_argument("export-fields: --every must be >= 1");
    const Trajectory traj = run_single(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    for (int k = 0; k <= traj.steps(); k += every) {
        const ParticleConfig& state = traj.states[static_cast<std::size_t>(k)];
        const MultiplierVector mult =
            k == 0 ? MultiplierVector::zeros(traj.n()) : traj.multipliers[static_cast<std::size_t>(k) - 1];
        const std::string tag = std::to_string(k);
        {
            std::ofstream f(dir / ("density_" + tag + ".csv"));
            write_field_csv(histogram_density(state), f);
        }
        auto [pc, pl] = pressure_fields(state, mult);
        {
            std::ofstream f(dir / ("pressure_" + tag + ".csv"));
            write_field_csv(pc, f);
        }
        {
            std::ofstream f(dir / ("pressure_linear_" + tag + ".csv"));
            write_field_csv(pl, f);
        }
    }
    return traj.completed ? 0 : 1;
}

int cmd_sweep(const ExperimentConfig& cfg, bool in_tau) {
    const SweepResult res = in_tau ? sweep_tau(cfg) : sweep_n(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    {
        std::ofstream csv(dir / (in_tau ? "sweep_tau.csv" : "sweep_n.csv"));
        write_sweep_csv(res, csv);
    }
    {
        std::ofstream js(dir / (in_tau ? "sweep_tau.json" : "sweep_n.json"));
        js << sweep_json(res) << '\n';
    }
    write_sweep_csv(res, std::cout);
    if (in_tau) std::cout << "residual order in tau: " << res.residual_order << '\n';
    if (!res.pass) std::cerr << "sweep failed: " << res.detail << '\n';
    return res.pass ? 0 : 1;
}

int cmd_steady_state(const ExperimentConfig& cfg) {
    const SteadyStateReport rep = steady_state_benchmark(cfg);
    for (const SteadyStateRecord& r : rep.records)
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "N=" << r.n << "  lattice deviation "
                  << r.lattice_deviation << " (tol " << r.lattice_tolerance << ")  decay exponent "
                  << r.decay_exponent << "  multiplier mismatch " << r.multiplier_mismatch
                  << "  min lambda " << r.min_lambda << '\n';
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-dimensional congested particle dynamics"};
    app.require_subcommand(1);

    CliOverrides o;
    int every = 1;

    CLI::App* simulate = app.add_subcommand("simulate", "run one trajectory and export it");
    add_common_options(simulate, o);
    CLI::App* sweep_t = app.add_subcommand("sweep-tau", "halving time-step refinement study");
    add_common_options(sweep_t, o);
    CLI::App* sweep_nn = app.add_subcommand("sweep-n", "doubling particle-count refinement study");
    add_common_options(sweep_nn, o);
    CLI::App* steady = app.add_subcommand("steady-state", "quadratic-potential equilibrium benchmark");
    add_common_options(steady, o);
    CLI::App* validate = app.add_subcommand("validate", "run the full property suite");
    add_common_options(validate, o);
    CLI::App* exportf = app.add_subcommand("export-fields", "export density and pressure snapshots");
    add_common_options(exportf, o);
    exportf->add_option("--every", every, "write every k-th step");

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = build_config(o);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (sweep_t->parsed()) return cmd_sweep(cfg, true);
        if (sweep_nn->parsed()) return cmd_sweep(cfg, false);
        if (steady->parsed()) return cmd_steady_state(cfg);
        if (exportf->parsed()) return cmd_export_fields(cfg, every);
        if (validate->parsed()) return run_validation_suite(cfg, std::cout) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
