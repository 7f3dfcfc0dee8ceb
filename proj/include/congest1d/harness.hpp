#pragma once

#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "congest1d/metrics.hpp"
#include "congest1d/potential.hpp"
#include "congest1d/sampling.hpp"
#include "congest1d/trajectory.hpp"

namespace congest1d {

struct ExperimentConfig {
    std::string scenario = "quadratic";
    MacroDensity rho0;
    Potential potential;
    std::optional<InteractionKernel> interaction;
    std::vector<int> n_values;
    std::vector<double> tau_values;
    double T = 1.0;
    int snapshots = 33;
    unsigned seed = 12345;
    int workers = 0;  // 0 = hardware concurrency
    std::string out_dir;
    bool strict_phi = true;
    JkoOptions jko;

    const InteractionKernel* kernel() const { return interaction ? &*interaction : nullptr; }
};

// Every (N, tau) pair must keep tau <= 0.5 / c2_eff; throws on violation.
void validate_config(const ExperimentConfig& cfg);

// Built-in scenarios "quadratic" and "double_well" with their reference
// densities and defaults.
ExperimentConfig benchmark_config(const std::string& name);

struct SweepRecord {
    int n = 0;
    double tau = 0.0;
    // distance to the next-finer resolution (tau/2 or 2N); NaN on the last row
    double cauchy_distance = 0.0;
    double weak_residual = 0.0;       // time-averaged max over the bump family
    double lambda_gap_l2t = 0.0;      // sup_s interpolant gap, L2 in time
    double pressure_gap_l2t = 0.0;    // sup_x pressure gap, L2 in time
    double slackness_integral = 0.0;  // |int Lambda_tilde (1 - ds X_tilde)|
    double emp_hist_w1 = 0.0;         // W1(rho_N, rho_tilde_N) at final time
    double emp_hist_w1_closed = 0.0;  // (x_N - x_0)/(2N)
    double lambda_l2_diff = 0.0;      // L2_{t,s} gap of Lambda_tilde to the 2N run
    EstimateSuite estimates;
    double mean_step_seconds = 0.0;
    int max_inner_iterations = 0;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    double residual_order = 0.0;  // log2 slope fitted on the residual column
    bool pass = true;
    std::string detail;
};

// Fixed N, halving tau list: Cauchy distances W2 at time T between
// consecutive resolutions must decrease, and the weak-form residual must
// scale like tau (consecutive ratios in [1/4, 3/4]).
SweepResult sweep_tau(const ExperimentConfig& cfg);

// Doubling N list, same rho0: sup-over-snapshots W1 between consecutive
// resolutions must decrease; interpolant-gap columns are recorded alongside.
SweepResult sweep_n(const ExperimentConfig& cfg);

struct SteadyStateRecord {
    int n = 0;
    double lattice_deviation = 0.0;   // max_i |x_i(T) - (i-(N+1)/2)/N|
    double lattice_tolerance = 0.0;   // max(10 tau, 1e-3)
    double multiplier_mismatch = 0.0; // vs -(2/N) sum_{j<=i} x_j
    double min_lambda = 0.0;
    double decay_exponent = 0.0;      // fitted d/dt log |mean|
    bool pass = false;
};

struct SteadyStateReport {
    std::vector<SteadyStateRecord> records;
    bool pass = true;
};

// phi(x) = 1 + x^2 benchmark: positions converge to the saturated lattice
// centered at the origin, the mean decays like exp(-2t), pressures match the
// partial sums of the stationarity relation.
SteadyStateReport steady_state_benchmark(const ExperimentConfig& cfg);

struct UniquenessReport {
    bool identical_seed_bitwise = false;
    double perturbed_difference = 0.0;  // L2(0,1) difference of final states
    double tolerance = 0.0;             // 10 * tol_kkt * K
    double pav_tiebreak_difference = 0.0;
    bool pass = false;
};

// Determinism-up-to-tolerance: perturbed inner warm starts land on the same
// trajectory, projection output does not depend on pooling order.
UniquenessReport uniqueness_probe(const ExperimentConfig& cfg);

// Aggregated worst-case diagnostics over randomized scenarios (seeded):
// random block densities, random admissible potentials and step sizes,
// occasionally an interaction kernel, a handful of steps each.
struct RandomSuiteOutcome {
    int scenarios = 0;
    int steps = 0;
    double worst_gap_violation = 0.0;  // max of (1/N - min gap), clipped at 0
    double min_lambda = 0.0;
    double worst_boundary = 0.0;   // |lambda_0|, |lambda_N| after recovery
    double worst_slackness = 0.0;
    double worst_consistency = 0.0;
    double worst_dissipation = 0.0;  // max of energy_after + movement - energy_before
    double elapsed_seconds = 0.0;
};

RandomSuiteOutcome run_random_scenarios(int count, unsigned seed, bool include_interaction = true);

// Seeded generator of 1-5 block densities with heights <= 1 and unit mass.
MacroDensity random_block_density(std::mt19937_64& rng);

// Full property suite behind the `validate` CLI subcommand; prints one line
// per check and returns the number of failures.
int run_validation_suite(const ExperimentConfig& cfg, std::ostream& out);

// Configuration and density I/O ("uniform:a,b" or a JSON file with
// breakpoints/values; config files are JSON with the keys used above).
MacroDensity density_from_spec(const std::string& spec);
ExperimentConfig config_from_json_file(const std::string& path);

void write_sweep_csv(const SweepResult& r, std::ostream& out);
std::string sweep_json(const SweepResult& r);

}  // namespace congest1d
