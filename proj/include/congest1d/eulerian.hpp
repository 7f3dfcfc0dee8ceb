#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "congest1d/trajectory.hpp"
#include "congest1d/types.hpp"

namespace congest1d {

// Scalar field on the line: either a purely atomic measure or a compactly
// supported piecewise-constant/linear function (zero outside the cells).
struct PiecewiseField {
    enum class Kind { empirical_atoms, density_histogram, pressure_constant, pressure_linear };
    Kind kind{};
    std::vector<double> breakpoints;               // C+1 entries for C cells
    std::vector<double> values;                    // value at the left edge of each cell
    std::vector<double> slopes;                    // per-cell slope (pressure_linear)
    std::vector<std::pair<double, double>> atoms;  // (location, mass)

    int cells() const { return breakpoints.empty() ? 0 : static_cast<int>(breakpoints.size()) - 1; }
    double mass() const;
    double value_at(double x) const;  // piecewise kinds only
    double sup_value() const;
};

// rho_N: N unit atoms of mass 1/N.
PiecewiseField empirical_measure(const ParticleConfig& X);

// Histogram density: value 1/(N (x_{i+1}-x_i)) on [x_i, x_{i+1}), i = 0..N-1
// with the virtual node x_0 = x_1 - 2/N. Mass 1, values <= 1 on admissible
// input, first cell exactly 1/2.
PiecewiseField histogram_density(const ParticleConfig& X);

// Piecewise-constant pressure lambda_i on [x_i, x_{i+1}) and its continuous
// piecewise-linear companion: ramps of half-width 1/(2N) centered at the
// particles, held constant at lambda_i between consecutive ramps.
std::pair<PiecewiseField, PiecewiseField> pressure_fields(const ParticleConfig& X,
                                                          const MultiplierVector& L);

// sup over cells of |p (1 - rho)| for a histogram density and a constant
// pressure on the same breakpoints.
double saturation_check(const PiecewiseField& rho, const PiecewiseField& p);

// C^2 compactly supported test function psi(x) = u^m (1 - u^2)^3 with
// u = (x - center)/radius, m in {0, 1, 2}; closed-form derivatives.
struct BumpTestFunction {
    double center = 0.0;
    double radius = 1.0;
    int moment = 0;

    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;
    double support_lo() const { return center - radius; }
    double support_hi() const { return center + radius; }
};

BumpTestFunction make_bump(double center, double radius, int moment);

// Family spanning the low moments on [-R, R].
std::vector<BumpTestFunction> standard_bump_family(double center, double radius);

// Residual of the discrete continuity equation against psi at step k:
//   | d_t <psi, rho_N> + (1/N) sum psi'(x_i) drift_i - int psi'' p_N |
// with the pressure integral evaluated exactly (p_N is piecewise constant
// and psi' is closed form). O(tau) along trajectories, zero at stationary
// points up to the solver tolerance.
double weak_form_residual(const Trajectory& traj, const BumpTestFunction& psi, int k);

// CSV per snapshot field: atoms as "x,mass", cells as "left,right,value,slope".
void write_field_csv(const PiecewiseField& f, std::ostream& out);

}  // namespace congest1d
