#pragma once

#include <string>
#include <vector>

#include "congest1d/eulerian.hpp"
#include "congest1d/sampling.hpp"
#include "congest1d/trajectory.hpp"
#include "congest1d/types.hpp"

namespace congest1d {

// Quantile of the empirical measure: step function x_i on ((i-1)/N, i/N].
QuantileFn empirical_quantile(const ParticleConfig& X);

// Quantile of the histogram density: the continuous piecewise-linear map
// through the nodes x_0..x_N at s = i/N.
QuantileFn histogram_quantile(const ParticleConfig& X);

// (int_0^1 |q1 - q2|^p ds)^{1/p}, exact over the merged knot set for
// p in {1, 2}; other p >= 1 available behind allow_general_p via adaptive
// quadrature. Inputs must be nondecreasing.
double wasserstein_p(const QuantileFn& q1, const QuantileFn& q2, double p,
                     bool allow_general_p = false);

// Closed form for W_p(rho_N, rho_tilde_N):
// ((1/((p+1)N)) sum_{i=0}^{N-1} (x_{i+1}-x_i)^p)^{1/p}, the i = 0 gap being
// the virtual 2/N cell. For p = 1 this telescopes to (x_N - x_0)/(2N).
double emp_vs_hist_closed_form(const ParticleConfig& X, double p);

// 1-Lipschitz test function: piecewise linear through (knots, values),
// extended by constants. Slopes are checked exactly.
struct LipschitzWitness {
    std::vector<double> knots;
    std::vector<double> values;

    double operator()(double x) const;
    double max_slope() const;
};

// max over witnesses of |<psi, f1> - <psi, f2>|; a lower bound for
// W_1(f1, f2) whenever both fields are probability measures. Integrals are
// exact (piecewise-polynomial integrands).
double kr_dual_lower_bound(const PiecewiseField& f1, const PiecewiseField& f2,
                           const std::vector<LipschitzWitness>& witnesses);

struct EstimateRecord {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
};

// A priori bounds checked along a trajectory, with the constants assembled
// from (phi_bar, c0, c2, T):
//   second_moment        sup_k (1/N) sum |x_i^k|^2            <= phi_bar/c0
//   movement             sum_k (tau/N) sum |dx/tau|^2          <= 2 phi_bar
//   multiplier_increments sum_k (tau/N) sum |N dlambda|^2      <= 4 c2^2 T (1 + phi_bar/c0) + 4 phi_bar
//   multipliers          sum_k (tau/N) sum lambda_i^2          <= same
//   time_equicontinuity  W_2^2 between snapshots / elapsed     <= 2 phi_bar
struct EstimateSuite {
    std::vector<EstimateRecord> records;
    double phi_bar = 0.0, c0 = 0.0, c2 = 0.0, T = 0.0;
    bool applicable = true;  // false for interaction runs or non-confining potentials
    bool all_pass = true;
};

EstimateSuite estimate_suite(const Trajectory& traj, int snapshot_count = 33);

std::string estimate_suite_json(const EstimateSuite& s);

}  // namespace congest1d
