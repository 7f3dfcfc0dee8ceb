#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "congest1d/jko.hpp"
#include "congest1d/potential.hpp"
#include "congest1d/types.hpp"

namespace congest1d {

// A discrete-in-time run of the minimizing-movement scheme. states holds
// X^0..X^K; multipliers[k] and reports[k] belong to the step X^k -> X^{k+1}.
struct Trajectory {
    double tau = 0.0;
    Potential potential;
    std::optional<InteractionKernel> interaction;
    std::vector<ParticleConfig> states;
    std::vector<MultiplierVector> multipliers;
    std::vector<StepReport> reports;
    double phi_bar = 0.0;  // (1/N) sum phi(x_i^0)

    bool completed = true;
    int failed_step = -1;
    std::string failure;

    int n() const { return states.front().n(); }
    int steps() const { return static_cast<int>(reports.size()); }
    double duration() const { return tau * steps(); }
    const InteractionKernel* kernel() const { return interaction ? &*interaction : nullptr; }
};

// Iterate the implicit step from X0 up to time T = K tau (K integral).
// A failing inner solve aborts the run and leaves the partial trajectory
// with completed = false and the failing step recorded.
Trajectory integrate(const ParticleConfig& X0, const Potential& p, const InteractionKernel* w,
                     double tau, double T, const JkoOptions& opt = {});

// The three time interpolants at time t in [0, T]: piecewise-constant
// positions X^tau (right endpoint of the step interval), piecewise-linear
// positions, and piecewise-constant multipliers.
struct TimeSlice {
    ParticleConfig piecewise_constant;
    ParticleConfig piecewise_linear;
    MultiplierVector multipliers;
};
TimeSlice eval_time_interpolants(const Trajectory& traj, double t);

// Interpolants in the Lagrangian variable s in [0,1] on the grid s_i = i/N,
// with the virtual node x_0 = x_1 - 2/N.
struct LagrangianInterpolant {
    enum class Kind {
        x_piecewise_constant,    // X(s) = x_i on ((i-1)/N, i/N]
        x_piecewise_linear,      // nodes x_0..x_N, linear on [i/N, (i+1)/N]
        lambda_piecewise_constant,  // lambda_i on [i/N, (i+1)/N)
        lambda_piecewise_linear     // nodes lambda_0..lambda_N
    };
    Kind kind{};
    int n = 0;
    std::vector<double> nodes;  // size N+1

    double operator()(double s) const;
};

struct LagrangianInterpolants {
    LagrangianInterpolant x_const, x_lin, lambda_const, lambda_lin;
};
LagrangianInterpolants build_lagrangian_interpolants(const ParticleConfig& state,
                                                     const MultiplierVector& mult);

// Residual of the discrete evolution system at a time interior to step k:
// max_i |(x_i^{k+1}-x_i^k)/tau + phi'(x_i^{k+1}) + drift_i + N(lambda_i - lambda_{i-1})|.
double lagrangian_pde_residual(const Trajectory& traj, double t);

// Normalized gap omega_i = N (x_{i+1} - x_i), i = 0..N-1; omega_0 = 2 by the
// virtual-node convention.
double omega(const ParticleConfig& state, int i);

// x_N - x_0 (support diameter including the virtual cell).
double support_diameter(const ParticleConfig& state);

// sup_s |Lambda_tilde - Lambda| for one snapshot = max_i |lambda_{i+1} - lambda_i|.
double lambda_interpolant_sup_gap(const MultiplierVector& mult);

// Exact integral over s of Lambda_tilde (1 - ds X_tilde) for one snapshot.
double slackness_pairing(const ParticleConfig& state, const MultiplierVector& mult);

// L2-in-time norm of sup_s |Lambda_tilde - Lambda| over the step partition.
double lambda_interpolant_gap_L2t(const Trajectory& traj);

// |integral over t and s of Lambda_tilde (1 - ds X_tilde)|, exact in s and
// over the step partition in t.
double slackness_integral(const Trajectory& traj);

// max over steps of the Euclidean displacement |X^{k+1} - X^k| (this equals
// sup_t of the distance between the two time interpolants).
double max_step_displacement(const Trajectory& traj);

// CSV with columns k,t,i,x,lambda (lambda of the contact to the right of
// particle i, zero row for k = 0).
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

// JSON metadata: sizes, potential constants, residual maxima, energies.
std::string trajectory_metadata_json(const Trajectory& traj);

}  // namespace congest1d
