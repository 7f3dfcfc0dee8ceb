#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "congest1d/harness.hpp"

using namespace congest1d;

namespace {

Potential flat_potential() {
    Potential p;
    p.value = [](double) { return 1.0; };
    p.grad = [](double) { return 0.0; };
    p.hess = [](double) { return 0.0; };
    p.c0 = 0.0;
    p.c2 = 0.0;
    p.strict = false;
    p.name = "flat";
    return p;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config guard rejects oversized steps") {
    ExperimentConfig cfg = benchmark_config("quadratic");  // c2 = 2
    cfg.tau_values = {0.3};
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
    cfg.tau_values = {0.25};
    CHECK_NOTHROW(validate_config(cfg));
    cfg.interaction = quadratic_kernel();  // c2_eff = 4
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
}

TEST_CASE("random block densities are admissible") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 50; ++k) {
        const MacroDensity d = random_block_density(rng);
        CHECK(std::abs(d.mass() - 1.0) <= 1e-12);
        for (double v : d.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(d.values.size() + 1 == d.breakpoints.size());
    }
}

TEST_CASE("tau sweep on the quadratic benchmark") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.n_values = {16};
    cfg.tau_values = {4e-3, 2e-3, 1e-3};
    cfg.T = 0.24;
    cfg.workers = 2;
    const SweepResult res = sweep_tau(cfg);
    CHECK(res.pass);
    REQUIRE(res.records.size() == 3);
    CHECK(res.records[1].cauchy_distance <= res.records[0].cauchy_distance);
    CHECK(std::isnan(res.records[2].cauchy_distance));
    for (const SweepRecord& r : res.records) {
        CHECK(r.estimates.applicable);
        CHECK(r.estimates.all_pass);
    }
    CHECK(res.residual_order == doctest::Approx(1.0).epsilon(0.35));
}

TEST_CASE("tau sweep rejects a non-halving list") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.tau_values = {4e-3, 3e-3};
    CHECK_THROWS_AS(sweep_tau(cfg), std::invalid_argument);
}

TEST_CASE("stationary data: sweep distances vanish") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.potential = flat_potential();
    cfg.strict_phi = false;
    cfg.rho0 = uniform_density(0.0, 1.0);
    cfg.n_values = {8};
    cfg.tau_values = {4e-2, 2e-2, 1e-2};
    cfg.T = 0.2;
    const SweepResult res = sweep_tau(cfg);
    CHECK(res.pass);
    CHECK(res.records[0].cauchy_distance == doctest::Approx(0.0));
    CHECK(res.records[0].weak_residual == doctest::Approx(0.0));
}

TEST_CASE("N sweep on the quadratic benchmark") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.n_values = {8, 16, 32};
    cfg.tau_values = {2e-3};
    cfg.T = 0.25;
    cfg.workers = 2;
    const SweepResult res = sweep_n(cfg);
    CHECK(res.pass);
    REQUIRE(res.records.size() == 3);
    CHECK(res.records[1].cauchy_distance < res.records[0].cauchy_distance);
    CHECK(res.records[0].lambda_l2_diff >= 0.0);
    for (const SweepRecord& r : res.records) {
        CHECK(std::abs(r.emp_hist_w1 - r.emp_hist_w1_closed) <= 1e-10);
        // exact complementarity keeps the interpolant pairing far below 1/sqrt(N)
        CHECK(r.slackness_integral <= 1.0 / std::sqrt(static_cast<double>(r.n)));
    }
}

TEST_CASE("N sweep without dynamics keeps the sampling distances") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.potential = flat_potential();
    cfg.strict_phi = false;
    cfg.rho0 = uniform_density(-1.0, 1.0);
    cfg.n_values = {8, 16};
    cfg.tau_values = {1e-2};
    cfg.T = 0.1;
    const SweepResult res = sweep_n(cfg);
    CHECK(res.pass);
    const ParticleConfig a = sample_particles(quantile_of_density(cfg.rho0), 8);
    const ParticleConfig b = sample_particles(quantile_of_density(cfg.rho0), 16);
    const double initial = wasserstein_p(empirical_quantile(a), empirical_quantile(b), 1.0);
    CHECK(res.records[0].cauchy_distance == doctest::Approx(initial));
}

TEST_CASE("N sweep rejects a non-doubling list") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.n_values = {8, 24};
    CHECK_THROWS_AS(sweep_n(cfg), std::invalid_argument);
}

TEST_CASE("steady state for tiny systems lands on the hand-solved equilibria") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.rho0 = uniform_density(-1.0, 2.0);
    cfg.n_values = {2, 3};
    cfg.tau_values = {1e-3};
    cfg.T = 5.0;
    cfg.workers = 2;
    const SteadyStateReport rep = steady_state_benchmark(cfg);
    CHECK(rep.pass);
    for (const SteadyStateRecord& r : rep.records) {
        CHECK(r.lattice_deviation <= r.lattice_tolerance);
        CHECK(std::abs(r.decay_exponent + 2.0) <= 0.2);
        CHECK(r.min_lambda >= -1e-9);
    }
}

TEST_CASE("steady state requires the unit quadratic potential") {
    ExperimentConfig cfg = benchmark_config("double_well");
    cfg.n_values = {2};
    cfg.tau_values = {1e-3};
    CHECK_THROWS_AS(steady_state_benchmark(cfg), std::invalid_argument);
}

TEST_CASE("uniqueness probe") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.n_values = {16};
    cfg.tau_values = {2e-3};
    cfg.T = 0.2;
    const UniquenessReport rep = uniqueness_probe(cfg);
    CHECK(rep.pass);
    CHECK(rep.identical_seed_bitwise);
    CHECK(rep.pav_tiebreak_difference <= 1e-12);
    CHECK(rep.perturbed_difference <= rep.tolerance);
}

TEST_CASE("randomized scenario diagnostics stay within budget") {
    const RandomSuiteOutcome out = run_random_scenarios(15, 424242);
    CHECK(out.scenarios == 15);
    CHECK(out.worst_gap_violation <= 1e-12);
    CHECK(out.min_lambda >= -1e-9);
    CHECK(out.worst_boundary == 0.0);
    CHECK(out.worst_slackness <= 1e-8);
    CHECK(out.worst_consistency <= 1e-8);
    CHECK(out.worst_dissipation <= 1e-10);
}

TEST_CASE("density specs") {
    const MacroDensity u = density_from_spec("uniform:-1,1");
    CHECK(u.mass() == doctest::Approx(1.0));
    CHECK(u.values[0] == doctest::Approx(0.5));

    const std::string path = "tmp_density.json";
    {
        std::ofstream out(path);
        out << R"({"breakpoints": [0.0, 0.5, 1.0, 1.5], "values": [1.0, 0.0, 1.0]})";
    }
    const MacroDensity d = density_from_spec(path);
    CHECK(d.values.size() == 3);
    CHECK(d.mass() == doctest::Approx(1.0));
    std::remove(path.c_str());
    CHECK_THROWS_AS(density_from_spec("no_such_file.json"), std::invalid_argument);
}

TEST_CASE("config files override the scenario defaults") {
    const std::string path = "tmp_config.json";
    {
        std::ofstream out(path);
        out << R"({
            "scenario": "quadratic",
            "potential": {"kind": "double_well_confined", "amplitude": 3.0},
            "interaction": {"kind": "gaussian-bump", "amplitude": 0.2},
            "rho0": "uniform:-2,2",
            "N": [8, 16],
            "tau": 0.001,
            "T": 0.5,
            "seed": 99
        })";
    }
    const ExperimentConfig cfg = config_from_json_file(path);
    std::remove(path.c_str());
    CHECK(cfg.potential.name == "double_well_confined");
    CHECK(cfg.interaction.has_value());
    CHECK(cfg.n_values == std::vector<int>{8, 16});
    CHECK(cfg.tau_values == std::vector<double>{0.001});
    CHECK(cfg.T == doctest::Approx(0.5));
    CHECK(cfg.seed == 99);
    CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("sweep serialization") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.n_values = {8};
    cfg.tau_values = {4e-3, 2e-3};
    cfg.T = 0.1;
    const SweepResult res = sweep_tau(cfg);
    std::ostringstream csv;
    write_sweep_csv(res, csv);
    CHECK(csv.str().find("n,tau,cauchy") == 0);
    const std::string js = sweep_json(res);
    CHECK(js.find("\"records\"") != std::string::npos);
}

TEST_CASE("per-step cost grows subquadratically") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.n_values = {32, 64, 128, 256};
    cfg.tau_values = {2e-3};
    cfg.T = 0.1;
    cfg.workers = 1;
    const SweepResult res = sweep_n(cfg);
    REQUIRE(res.records.size() == 4);
    const double t_small = std::max(res.records.front().mean_step_seconds, 1e-7);
    const double t_large = std::max(res.records.back().mean_step_seconds, 1e-7);
    const double slope = std::log2(t_large / t_small) / 3.0;  // three doublings
    CHECK(slope <= 2.0);
}

TEST_CASE("validation suite passes end to end") {
    ExperimentConfig cfg = benchmark_config("quadratic");
    cfg.workers = 2;
    std::ostringstream out;
    CHECK(run_validation_suite(cfg, out) == 0);
    CHECK(out.str().find("[FAIL]") == std::string::npos);
}

}  // TEST_SUITE
