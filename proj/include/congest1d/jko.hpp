#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "congest1d/potential.hpp"
#include "congest1d/types.hpp"

namespace congest1d {

// Diagnostics of one minimizing-movement step.
struct StepReport {
    double energy_before = 0.0;   // (1/N) sum phi + interaction energy at X^k
    double energy_after = 0.0;    // same at X^{k+1}
    double movement = 0.0;        // |X^{k+1} - X^k|^2 / (2 N tau)
    double kkt_residual = 0.0;    // stationarity residual, units of phi' + v
    double slackness_residual = 0.0;   // max_i |lambda_i (gap_i - 1/N)|
    double multiplier_residual = 0.0;  // |lambda_N| before pinning it to zero
    std::vector<int> active_set;       // 0-based contact indices i: gap (x_i, x_{i+1}) at 1/N
    int inner_iterations = 0;
    double wall_seconds = 0.0;

    bool dissipative(double slack = 1e-10) const {
        return energy_after + movement <= energy_before + slack;
    }
};

struct JkoOptions {
    double kkt_tol_per_particle = 1e-10;  // accept when residual <= this * N
    double consistency_tol = 1e-8;        // budget for |lambda_N| before pinning
    double dual_tol = 1e-9;               // multiplier negativity budget
    double active_gap_tol = 1e-12;        // gap within this of 1/N counts as contact
    int max_iterations_base = 200;        // iteration cap = base + 10 N
    int polish_after_stable = 3;          // contact set stable this long -> Newton polish
    double guess_perturbation = 0.0;      // warm-start noise amplitude (determinism probes)
    unsigned perturbation_seed = 0;
};

// Inner solver gave up; carries the best iterate found.
struct JkoConvergenceError : std::runtime_error {
    ParticleConfig best;
    StepReport report;
    JkoConvergenceError(const std::string& what, ParticleConfig b, StepReport r)
        : std::runtime_error(what), best(std::move(b)), report(std::move(r)) {}
};

struct JkoResult {
    ParticleConfig config;
    MultiplierVector multipliers;
    StepReport report;
};

// Euclidean projection onto { z : z_{i+1} - z_i >= 1/n }. Shifting
// y_i -> y_i - i/n turns the chain constraint into monotonicity, solved
// exactly by pool-adjacent-violators in O(n).
std::vector<double> project_to_cone(const std::vector<double>& y);

// One implicit step: the unique minimizer over the admissible cone of
//   (1/N) sum_i phi(x_i) + |X - X^k|^2 / (2 N tau)   [+ interaction energy]
// with its contact pressures and diagnostics. Requires tau * c2_eff < 1
// (strong convexity); throws std::invalid_argument otherwise and
// JkoConvergenceError if the inner solver stalls.
JkoResult jko_step(const ParticleConfig& Xk, const Potential& p, const InteractionKernel* w,
                   double tau, const JkoOptions& opt = {});

// Pressures from the optimality system, accumulated left to right:
//   lambda_i = lambda_{i-1} - (1/N) (phi'(x_i) + drift_i + (x_i - x_i^k)/tau).
// Returns the vector with lambda_N pinned to zero and |lambda_N| as it came
// out of the accumulation; a large value flags an inexact inner solve.
std::pair<MultiplierVector, double> recover_multipliers(const ParticleConfig& Xk,
                                                        const ParticleConfig& Xk1,
                                                        const Potential& p, double tau,
                                                        const InteractionKernel* w = nullptr);

// max_i |lambda_i (x_{i+1} - x_i - 1/N)| over interior contacts.
double check_slackness(const ParticleConfig& X, const MultiplierVector& L);

// Objective value (1/N) sum phi(x_i) + (1/(2N^2)) sum_{ij} W(x_i - x_j).
double configuration_energy(const ParticleConfig& X, const Potential& p,
                            const InteractionKernel* w = nullptr);

}  // namespace congest1d
