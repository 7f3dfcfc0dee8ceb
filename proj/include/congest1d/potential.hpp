#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "congest1d/types.hpp"

namespace congest1d {

struct PotentialGridCheck {
    double max_lower_bound_violation = 0.0;  // max of c0(1+x^2) - phi(x)
    double max_hess_excess = 0.0;            // max of |phi''(x)| - c2
    double max_grad_fd_error = 0.0;          // relative central-difference mismatch
    bool pass = false;
};

// External potential phi supplied as a closed-form triple (value, grad, hess)
// together with declared constants:
//   c0 > 0 with phi(x) >= c0 * (1 + x^2)   (quadratic confinement)
//   c2     with |phi''(x)| <= c2            (bounded curvature)
// The solver never differentiates numerically; c2 enters the step-size guard
// and the a priori bounds, c0 the second-moment bound. The factories run the
// grid check once at construction and keep the outcome in `validation`.
struct Potential {
    std::function<double(double)> value;
    std::function<double(double)> grad;
    std::function<double(double)> hess;
    double c0 = 0.0;
    double c2 = 0.0;
    bool strict = true;  // lower bound phi >= c0(1+x^2) certified
    std::string name = "custom";
    PotentialGridCheck validation;
};

// Symmetric pairwise interaction W. Optional; when present the step objective
// gains (1/(2N^2)) sum_{i,j} W(x_i - x_j) and the drift the corresponding
// mean-field term. curvature_bound is sup |W''|, used in the step-size guard.
struct InteractionKernel {
    std::function<double(double)> value;
    std::function<double(double)> grad;
    double curvature_bound = 0.0;
    bool symmetric = true;
    std::string name = "custom";
};

// Grid surrogate for the global assumptions: checks the declared constants
// and the grad/value consistency on [lo, hi] with `points` samples.
PotentialGridCheck validate_potential(const Potential& p, double lo = -10.0, double hi = 10.0,
                                      int points = 2001);

struct KernelGridCheck {
    double max_symmetry_violation = 0.0;  // |W(z) - W(-z)|
    double max_odd_violation = 0.0;       // |W'(z) + W'(-z)|
    bool pass = false;
};

KernelGridCheck validate_kernel(const InteractionKernel& w, double lo = -10.0, double hi = 10.0,
                                int points = 2001);

// phi(x) = scale * (1 + (x - center)^2). The declared c0 is the exact
// largest constant with phi >= c0(1+x^2); c2 = 2*scale.
Potential quadratic_potential(double center, double scale);

// phi(x) = x^2 + amplitude * exp(-(x/width)^2): two wells at
// x = +-width*sqrt(log(amplitude/width^2)) when amplitude > width^2, with
// bounded curvature. c0 is computed by scanning phi(x)/(1+x^2).
Potential double_well_potential(double amplitude = 4.0, double width = 1.0);

// Potential from samples (x, value, grad, hess); piecewise-linear in value
// and grad, piecewise-constant hess. Evaluation outside the table range is a
// parameter error. c2 = max |hess| over the table; c0 scanned as above.
Potential table_potential(std::vector<double> xs, std::vector<double> values,
                          std::vector<double> grads, std::vector<double> hessians,
                          bool strict = true);

// W(z) = z^2 / 2 (attractive, curvature 1).
InteractionKernel quadratic_kernel();

// W(z) = amplitude * exp(-(z/width)^2) (repulsive bump for amplitude > 0).
InteractionKernel gaussian_bump_kernel(double amplitude, double width);

// Desired velocity of particle i (0-based): -phi'(x_i) minus the mean-field
// interaction drift (1/N) sum_j W'(x_i - x_j) when a kernel is present.
double total_drift(const Potential& p, const InteractionKernel* w, const ParticleConfig& config,
                   int i);

}  // namespace congest1d
