#include "congest1d/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace congest1d {

double MacroDensity::mass() const {
    double m = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j)
        m += values[j] * (breakpoints[j + 1] - breakpoints[j]);
    return m;
}

double MacroDensity::xi_left() const {
    for (std::size_t j = 0; j < values.size(); ++j)
        if (values[j] > 0.0) return breakpoints[j];
    return breakpoints.front();
}

double MacroDensity::xi_right() const {
    for (std::size_t j = values.size(); j-- > 0;)
        if (values[j] > 0.0) return breakpoints[j + 1];
    return breakpoints.back();
}

MacroDensity make_density(std::vector<double> breakpoints, std::vector<double> values) {
    if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size())
        throw std::invalid_argument("make_density: need M+1 breakpoints for M cell values");
    for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j)
        if (!(breakpoints[j] < breakpoints[j + 1]))
            throw std::invalid_argument("make_density: breakpoints must be strictly increasing");
    for (double v : values)
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("make_density: cell values must lie in [0, 1]");
    MacroDensity d{std::move(breakpoints), std::move(values)};
    if (std::abs(d.mass() - 1.0) > 1e-12)
        throw std::invalid_argument("make_density: total mass must equal 1");
    bool positive = false;
    for (double v : d.values) positive = positive || v > 0.0;
    if (!positive) throw std::invalid_argument("make_density: density is identically zero");
    return d;
}

MacroDensity uniform_density(double a, double b) {
    if (!(b - a >= 1.0))
        throw std::invalid_argument("uniform_density: need b - a >= 1 so the height is <= 1");
    return make_density({a, b}, {1.0 / (b - a)});
}

double QuantileFn::operator()(double s) const {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("QuantileFn: argument outside [0,1]");
    if (s == 0.0) return at_zero;
    // segment j covers (knots[j], knots[j+1]]
    auto it = std::lower_bound(knots.begin(), knots.end(), s);
    std::size_t j = static_cast<std::size_t>(it - knots.begin());
    if (j > 0) --j;
    if (j >= slope.size()) j = slope.size() - 1;
    return start_value[j] + slope[j] * (s - knots[j]);
}

bool QuantileFn::monotone(double tol) const {
    for (int j = 0; j < segments(); ++j) {
        if (slope[static_cast<std::size_t>(j)] < -tol) return false;
        if (j > 0 && start_value[static_cast<std::size_t>(j)] < end_value(j - 1) - tol) return false;
    }
    return true;
}

QuantileFn quantile_of_density(const MacroDensity& rho0) {
    if (!(rho0.mass() > 0.0)) throw std::invalid_argument("quantile_of_density: zero-mass density");
    QuantileFn q;
    q.at_zero = rho0.xi_left();
    q.knots.push_back(0.0);
    double s = 0.0;
    for (std::size_t j = 0; j < rho0.values.size(); ++j) {
        const double v = rho0.values[j];
        if (v <= 0.0) continue;  // gap: the next positive cell starts a jump
        const double w = rho0.breakpoints[j + 1] - rho0.breakpoints[j];
        q.start_value.push_back(rho0.breakpoints[j]);
        q.slope.push_back(1.0 / v);
        s += v * w;
        q.knots.push_back(s);
    }
    q.knots.back() = 1.0;  // running sum is 1 within 1e-12 by construction
    return q;
}

ParticleConfig sample_particles(const QuantileFn& X0, int N) {
    if (N < 2) throw std::invalid_argument("sample_particles: need at least 2 particles");
    ParticleConfig c;
    c.x.resize(static_cast<std::size_t>(N));
    for (int i = 1; i <= N; ++i)
        c.x[static_cast<std::size_t>(i) - 1] = X0(static_cast<double>(i) / N);
    if (!c.in_cone(1e-12))
        throw std::invalid_argument("sample_particles: sampled configuration violates the spacing "
                                    "constraint (density above 1?)");
    return c;
}

double sampling_error_bound_check(const QuantileFn& X0, const ParticleConfig& XN0) {
    const int N = XN0.n();
    // The sampled map dominates X0 pointwise, so |X_N - X0| integrates
    // segment by segment without sign splits.
    double total = 0.0;
    for (int i = 1; i <= N; ++i) {
        const double s_lo = static_cast<double>(i - 1) / N;
        const double s_hi = static_cast<double>(i) / N;
        const double xi = XN0.x[static_cast<std::size_t>(i) - 1];
        // split (s_lo, s_hi] at the quantile's knots
        double a = s_lo;
        for (std::size_t j = 0; j < X0.slope.size(); ++j) {
            const double lo = std::max(a, X0.knots[j]);
            const double hi = std::min(s_hi, X0.knots[j + 1]);
            if (hi <= lo) continue;
            // X0 is linear on (lo, hi]: value v0 + m (s - knots[j])
            const double v0 = X0.start_value[j];
            const double m = X0.slope[j];
            const double f_lo = xi - (v0 + m * (lo - X0.knots[j]));
            const double f_hi = xi - (v0 + m * (hi - X0.knots[j]));
            total += 0.5 * (f_lo + f_hi) * (hi - lo);
            a = hi;
        }
    }
    return total;
}

}  // namespace congest1d
