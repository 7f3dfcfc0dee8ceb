#pragma once

#include <vector>

#include "congest1d/types.hpp"

namespace congest1d {

// Piecewise-constant probability density on finitely many cells,
// 0 <= value <= 1 per cell and unit total mass. Cell j is
// [breakpoints[j], breakpoints[j+1]) with constant density values[j].
struct MacroDensity {
    std::vector<double> breakpoints;  // sorted, size M+1
    std::vector<double> values;       // size M

    double mass() const;
    double xi_left() const;   // inf of the support
    double xi_right() const;  // sup of the support
};

// Validating constructor; throws std::invalid_argument on a malformed table
// (unsorted breakpoints, value outside [0,1], mass != 1 within 1e-12).
MacroDensity make_density(std::vector<double> breakpoints, std::vector<double> values);

// Uniform density on [a, b]; requires b - a >= 1 so the height is <= 1.
MacroDensity uniform_density(double a, double b);

// Monotone function on [0,1] stored as linear segments over
// (knots[j], knots[j+1]], evaluated closed on the right so that the value at
// a jump level is the infimum (the left end of the corresponding gap).
// Jumps show up as start_value[j+1] > end_value(j).
struct QuantileFn {
    std::vector<double> knots;        // 0 = s_0 < ... < s_m = 1
    std::vector<double> start_value;  // limit from the right at knots[j], j < m
    std::vector<double> slope;        // slope of segment j
    double at_zero = 0.0;             // value at s = 0

    int segments() const { return static_cast<int>(slope.size()); }
    double end_value(int j) const {
        return start_value[static_cast<std::size_t>(j)] +
               slope[static_cast<std::size_t>(j)] *
                   (knots[static_cast<std::size_t>(j) + 1] - knots[static_cast<std::size_t>(j)]);
    }
    double operator()(double s) const;

    double xi_left() const { return at_zero; }
    double xi_right() const { return end_value(segments() - 1); }

    // nondecreasing within segments and across knots
    bool monotone(double tol = 1e-12) const;
};

// Quantile (pseudo-inverse CDF) of a piecewise-constant density:
// X(s) = inf{ x : CDF(x) >= s }, X(0) = xi_left. Linear with slope 1/value
// across each positive cell, jumping over zero-density gaps.
QuantileFn quantile_of_density(const MacroDensity& rho0);

// x_i = X0(i/N), i = 1..N. The result is admissible (gaps >= 1/N) whenever
// X0 comes from a density bounded by 1; violations beyond 1e-12 are an
// input error. N >= 2.
ParticleConfig sample_particles(const QuantileFn& X0, int N);

// Exact L1(0,1) distance between X0 and the piecewise-constant sampled map
// s -> x_ceil(Ns). The caller asserts <= (xi_right - xi_left)/N.
double sampling_error_bound_check(const QuantileFn& X0, const ParticleConfig& XN0);

}  // namespace congest1d
