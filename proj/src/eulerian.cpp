#include "congest1d/eulerian.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace congest1d {

double PiecewiseField::mass() const {
    if (kind == Kind::empirical_atoms) {
        double m = 0.0;
        for (const auto& [loc, w] : atoms) {
            (void)loc;
            m += w;
        }
        return m;
    }
    double m = 0.0;
    for (int c = 0; c < cells(); ++c) {
        const double h = breakpoints[static_cast<std::size_t>(c) + 1] - breakpoints[static_cast<std::size_t>(c)];
        const double slope = slopes.empty() ? 0.0 : slopes[static_cast<std::size_t>(c)];
        m += h * (values[static_cast<std::size_t>(c)] + 0.5 * slope * h);
    }
    return m;
}

double PiecewiseField::value_at(double x) const {
    if (kind == Kind::empirical_atoms)
        throw std::invalid_argument("PiecewiseField: atomic measures have no pointwise density");
    if (breakpoints.empty() || x < breakpoints.front() || x >= breakpoints.back()) return 0.0;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    std::size_t c = static_cast<std::size_t>(it - breakpoints.begin());
    if (c > 0) --c;
    if (c >= values.size()) c = values.size() - 1;
    const double slope = slopes.empty() ? 0.0 : slopes[c];
    return values[c] + slope * (x - breakpoints[c]);
}

double PiecewiseField::sup_value() const {
    double m = 0.0;
    for (int c = 0; c < cells(); ++c) {
        const double h = breakpoints[static_cast<std::size_t>(c) + 1] - breakpoints[static_cast<std::size_t>(c)];
        const double slope = slopes.empty() ? 0.0 : slopes[static_cast<std::size_t>(c)];
        m = std::max({m, values[static_cast<std::size_t>(c)], values[static_cast<std::size_t>(c)] + slope * h});
    }
    return m;
}

PiecewiseField empirical_measure(const ParticleConfig& X) {
    PiecewiseField f;
    f.kind = PiecewiseField::Kind::empirical_atoms;
    const double w = 1.0 / X.n();
    for (double xi : X.x) f.atoms.emplace_back(xi, w);
    return f;
}

PiecewiseField histogram_density(const ParticleConfig& X) {
    if (!X.in_cone(1e-12))
        throw std::invalid_argument("histogram_density: configuration violates the spacing constraint");
    const int n = X.n();
    PiecewiseField f;
    f.kind = PiecewiseField::Kind::density_histogram;
    f.breakpoints.push_back(X.virtual_left());
    for (double xi : X.x) f.breakpoints.push_back(xi);
    for (int c = 0; c < n; ++c)
        f.values.push_back(1.0 / (n * (f.breakpoints[static_cast<std::size_t>(c) + 1] -
                                       f.breakpoints[static_cast<std::size_t>(c)])));
    return f;
}

std::pair<PiecewiseField, PiecewiseField> pressure_fields(const ParticleConfig& X,
                                                          const MultiplierVector& L) {
    const int n = X.n();
    if (L.n() != n) throw std::invalid_argument("pressure_fields: size mismatch");
    PiecewiseField pc;
    pc.kind = PiecewiseField::Kind::pressure_constant;
    pc.breakpoints.push_back(X.virtual_left());
    for (double xi : X.x) pc.breakpoints.push_back(xi);
    for (int i = 0; i < n; ++i) pc.values.push_back(L.lambda[static_cast<std::size_t>(i)]);

    // ramps of half-width r at each particle, plateaus in between
    PiecewiseField pl;
    pl.kind = PiecewiseField::Kind::pressure_linear;
    const double r = 0.5 / n;
    pl.breakpoints.push_back(X.x.front() - r);
    for (int i = 1; i <= n; ++i) {
        const double xi = X.x[static_cast<std::size_t>(i) - 1];
        const double lam_prev = L.lambda[static_cast<std::size_t>(i) - 1];
        const double lam = L.lambda[static_cast<std::size_t>(i)];
        pl.values.push_back(lam_prev);
        pl.slopes.push_back(n * (lam - lam_prev));
        pl.breakpoints.push_back(xi + r);
        if (i < n) {
            const double next_ramp = X.x[static_cast<std::size_t>(i)] - r;
            if (next_ramp > xi + r + 1e-15) {
                pl.values.push_back(lam);
                pl.slopes.push_back(0.0);
                pl.breakpoints.push_back(next_ramp);
            }
        }
    }
    return {std::move(pc), std::move(pl)};
}

double saturation_check(const PiecewiseField& rho, const PiecewiseField& p) {
    if (rho.kind != PiecewiseField::Kind::density_histogram ||
        p.kind != PiecewiseField::Kind::pressure_constant)
        throw std::invalid_argument("saturation_check: expects a histogram density and a constant pressure");
    if (rho.breakpoints.size() != p.breakpoints.size())
        throw std::invalid_argument("saturation_check: fields live on different breakpoints");
    double worst = 0.0;
    for (std::size_t c = 0; c < rho.values.size(); ++c)
        worst = std::max(worst, std::abs(p.values[c] * (1.0 - rho.values[c])));
    return worst;
}

namespace {

// coefficients of u^m (1-u^2)^3 and derivatives in u
struct BumpPoly {
    double c[9] = {0};  // degree <= 8
    int deg = 0;

    static BumpPoly base(int m) {
        BumpPoly p;
        const double kernel[7] = {1, 0, -3, 0, 3, 0, -1};  // (1-u^2)^3
        for (int k = 0; k <= 6; ++k) p.c[k + m] = kernel[k];
        p.deg = 6 + m;
        return p;
    }
    BumpPoly derivative() const {
        BumpPoly d;
        for (int k = 1; k <= deg; ++k) d.c[k - 1] = k * c[k];
        d.deg = deg > 0 ? deg - 1 : 0;
        return d;
    }
    double eval(double u) const {
        double v = 0.0;
        for (int k = deg; k >= 0; --k) v = v * u + c[k];
        return v;
    }
};

}  // namespace

double BumpTestFunction::value(double x) const {
    const double u = (x - center) / radius;
    if (std::abs(u) >= 1.0) return 0.0;
    return BumpPoly::base(moment).eval(u);
}

double BumpTestFunction::d1(double x) const {
    const double u = (x - center) / radius;
    if (std::abs(u) >= 1.0) return 0.0;
    return BumpPoly::base(moment).derivative().eval(u) / radius;
}

double BumpTestFunction::d2(double x) const {
    const double u = (x - center) / radius;
    if (std::abs(u) >= 1.0) return 0.0;
    return BumpPoly::base(moment).derivative().derivative().eval(u) / (radius * radius);
}

BumpTestFunction make_bump(double center, double radius, int moment) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("make_bump: support must be compact (finite positive radius)");
    if (moment < 0 || moment > 2) throw std::invalid_argument("make_bump: moment must be 0, 1 or 2");
    return BumpTestFunction{center, radius, moment};
}

std::vector<BumpTestFunction> standard_bump_family(double center, double radius) {
    return {make_bump(center, radius, 0), make_bump(center, radius, 1), make_bump(center, radius, 2)};
}

double weak_form_residual(const Trajectory& traj, const BumpTestFunction& psi, int k) {
    if (k < 0 || k >= traj.steps())
        throw std::invalid_argument("weak_form_residual: step index out of range");
    const ParticleConfig& a = traj.states[static_cast<std::size_t>(k)];
    const ParticleConfig& b = traj.states[static_cast<std::size_t>(k) + 1];
    const MultiplierVector& m = traj.multipliers[static_cast<std::size_t>(k)];
    const int n = traj.n();
    const InteractionKernel* w = traj.kernel();

    double time_term = 0.0, drift_term = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xb = b.x[static_cast<std::size_t>(i)];
        time_term += psi.value(xb) - psi.value(a.x[static_cast<std::size_t>(i)]);
        double drift = traj.potential.grad(xb);
        if (w) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += w->grad(xb - b.x[static_cast<std::size_t>(j)]);
            drift += s / n;
        }
        drift_term += psi.d1(xb) * drift;
    }
    time_term /= n * traj.tau;
    drift_term /= n;

    // int psi'' p_N = sum_i lambda_i (psi'(x_{i+1}) - psi'(x_i)), exact
    double pressure_term = 0.0;
    double left = b.virtual_left();
    for (int i = 0; i < n; ++i) {
        const double right = b.x[static_cast<std::size_t>(i)];
        pressure_term += m.lambda[static_cast<std::size_t>(i)] * (psi.d1(right) - psi.d1(left));
        left = right;
    }
    return std::abs(time_term + drift_term - pressure_term);
}

void write_field_csv(const PiecewiseField& f, std::ostream& out) {
    if (f.kind == PiecewiseField::Kind::empirical_atoms) {
        out << "x,mass\n";
        for (const auto& [loc, w] : f.atoms) out << loc << ',' << w << '\n';
        return;
    }
    out << "left,right,value,slope\n";
    for (int c = 0; c < f.cells(); ++c)
        out << f.breakpoints[static_cast<std::size_t>(c)] << ','
            << f.breakpoints[static_cast<std::size_t>(c) + 1] << ','
            << f.values[static_cast<std::size_t>(c)] << ','
            << (f.slopes.empty() ? 0.0 : f.slopes[static_cast<std::size_t>(c)]) << '\n';
}

}  // namespace congest1d
