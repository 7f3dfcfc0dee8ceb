#include "congest1d/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <json.hpp>

namespace congest1d {

QuantileFn empirical_quantile(const ParticleConfig& X) {
    const int n = X.n();
    QuantileFn q;
    q.at_zero = X.x.front();
    q.knots.resize(static_cast<std::size_t>(n) + 1);
    q.start_value.resize(static_cast<std::size_t>(n));
    q.slope.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i <= n; ++i) q.knots[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
    for (int i = 0; i < n; ++i) q.start_value[static_cast<std::size_t>(i)] = X.x[static_cast<std::size_t>(i)];
    return q;
}

QuantileFn histogram_quantile(const ParticleConfig& X) {
    const int n = X.n();
    QuantileFn q;
    q.at_zero = X.virtual_left();
    q.knots.resize(static_cast<std::size_t>(n) + 1);
    q.start_value.resize(static_cast<std::size_t>(n));
    q.slope.resize(static_cast<std::size_t>(n));
    for (int i = 0; i <= n; ++i) q.knots[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
    double left = X.virtual_left();
    for (int i = 0; i < n; ++i) {
        const double right = X.x[static_cast<std::size_t>(i)];
        q.start_value[static_cast<std::size_t>(i)] = left;
        q.slope[static_cast<std::size_t>(i)] = n * (right - left);
        left = right;
    }
    return q;
}

namespace {

// index of the segment of q covering (s, s + 0): last j with knots[j] <= s
std::size_t segment_at(const QuantileFn& q, double s) {
    auto it = std::upper_bound(q.knots.begin(), q.knots.end(), s);
    std::size_t j = static_cast<std::size_t>(it - q.knots.begin());
    if (j > 0) --j;
    if (j >= q.slope.size()) j = q.slope.size() - 1;
    return j;
}

double segment_abs_integral(double d0, double d1, double h) {
    if (d0 * d1 >= 0.0) return 0.5 * (std::abs(d0) + std::abs(d1)) * h;
    const double t = h * d0 / (d0 - d1);  // root of the linear difference
    return 0.5 * (std::abs(d0) * t + std::abs(d1) * (h - t));
}

double adaptive_abs_p(const std::function<double(double)>& d, double a, double b, double p,
                      int depth) {
    const double m = 0.5 * (a + b);
    auto simpson = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi);
        return (hi - lo) / 6.0 *
               (std::pow(std::abs(d(lo)), p) + 4.0 * std::pow(std::abs(d(mid)), p) +
                std::pow(std::abs(d(hi)), p));
    };
    const double whole = simpson(a, b), half = simpson(a, m) + simpson(m, b);
    if (depth <= 0 || std::abs(whole - half) < 1e-13) return half;
    return adaptive_abs_p(d, a, m, p, depth - 1) + adaptive_abs_p(d, m, b, p, depth - 1);
}

}  // namespace

double wasserstein_p(const QuantileFn& q1, const QuantileFn& q2, double p, bool allow_general_p) {
    const bool exact = std::abs(p - 1.0) < 1e-14 || std::abs(p - 2.0) < 1e-14;
    if (!exact && !allow_general_p)
        throw std::invalid_argument("wasserstein_p: exact quadrature supports p in {1, 2}");
    if (!(p >= 1.0)) throw std::invalid_argument("wasserstein_p: order must be >= 1");
    if (!q1.monotone(1e-12) || !q2.monotone(1e-12))
        throw std::invalid_argument("wasserstein_p: quantile functions must be nondecreasing");

    std::vector<double> grid;
    grid.reserve(q1.knots.size() + q2.knots.size());
    grid.insert(grid.end(), q1.knots.begin(), q1.knots.end());
    grid.insert(grid.end(), q2.knots.begin(), q2.knots.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double total = 0.0;
    for (std::size_t m = 0; m + 1 < grid.size(); ++m) {
        const double s0 = grid[m], s1 = grid[m + 1], h = s1 - s0;
        if (h <= 0.0) continue;
        const std::size_t j1 = segment_at(q1, s0), j2 = segment_at(q2, s0);
        const double a0 = q1.start_value[j1] + q1.slope[j1] * (s0 - q1.knots[j1]);
        const double b0 = q2.start_value[j2] + q2.slope[j2] * (s0 - q2.knots[j2]);
        const double d0 = a0 - b0;
        const double d1 = d0 + (q1.slope[j1] - q2.slope[j2]) * h;
        if (std::abs(p - 1.0) < 1e-14) {
            total += segment_abs_integral(d0, d1, h);
        } else if (std::abs(p - 2.0) < 1e-14) {
            total += h * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
        } else {
            const double beta = (q1.slope[j1] - q2.slope[j2]);
            total += adaptive_abs_p([d0, beta](double t) { return d0 + beta * t; }, 0.0, h, p, 30);
        }
    }
    return std::pow(total, 1.0 / p);
}

double emp_vs_hist_closed_form(const ParticleConfig& X, double p) {
    if (!X.in_cone(1e-12))
        throw std::invalid_argument("emp_vs_hist_closed_form: configuration outside the admissible cone");
    if (!(p >= 1.0)) throw std::invalid_argument("emp_vs_hist_closed_form: order must be >= 1");
    const int n = X.n();
    double acc = 0.0;
    double left = X.virtual_left();
    for (int i = 0; i < n; ++i) {
        acc += std::pow(X.x[static_cast<std::size_t>(i)] - left, p);
        left = X.x[static_cast<std::size_t>(i)];
    }
    return std::pow(acc / ((p + 1.0) * n), 1.0 / p);
}

double LipschitzWitness::operator()(double x) const {
    if (knots.empty()) return 0.0;
    if (x <= knots.front()) return values.front();
    if (x >= knots.back()) return values.back();
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - knots.begin()) - 1;
    const double t = (x - knots[j]) / (knots[j + 1] - knots[j]);
    return (1.0 - t) * values[j] + t * values[j + 1];
}

double LipschitzWitness::max_slope() const {
    double m = 0.0;
    for (std::size_t j = 0; j + 1 < knots.size(); ++j)
        m = std::max(m, std::abs(values[j + 1] - values[j]) / (knots[j + 1] - knots[j]));
    return m;
}

namespace {

double pair_against(const LipschitzWitness& psi, const PiecewiseField& f) {
    if (f.kind == PiecewiseField::Kind::empirical_atoms) {
        double s = 0.0;
        for (const auto& [loc, w] : f.atoms) s += w * psi(loc);
        return s;
    }
    // split every cell at the witness knots; both factors linear on each piece
    double s = 0.0;
    for (int c = 0; c < f.cells(); ++c) {
        const double lo = f.breakpoints[static_cast<std::size_t>(c)];
        const double hi = f.breakpoints[static_cast<std::size_t>(c) + 1];
        const double v = f.values[static_cast<std::size_t>(c)];
        const double sl = f.slopes.empty() ? 0.0 : f.slopes[static_cast<std::size_t>(c)];
        std::vector<double> cuts{lo};
        for (double k : psi.knots)
            if (k > lo && k < hi) cuts.push_back(k);
        cuts.push_back(hi);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t m = 0; m + 1 < cuts.size(); ++m) {
            const double a = cuts[m], b = cuts[m + 1], h = b - a;
            if (h <= 0.0) continue;
            const double fa = v + sl * (a - lo), fb = v + sl * (b - lo);
            const double pa = psi(a), pb = psi(b);
            // int of (linear f)(linear psi) via the 2-point closed form
            s += h / 6.0 * (2.0 * fa * pa + fa * pb + fb * pa + 2.0 * fb * pb);
        }
    }
    return s;
}

}  // namespace

double kr_dual_lower_bound(const PiecewiseField& f1, const PiecewiseField& f2,
                           const std::vector<LipschitzWitness>& witnesses) {
    double best = 0.0;
    for (const LipschitzWitness& psi : witnesses) {
        if (psi.knots.size() != psi.values.size() || psi.knots.size() < 2)
            throw std::invalid_argument("kr_dual_lower_bound: malformed witness");
        if (psi.max_slope() > 1.0 + 1e-12)
            throw std::invalid_argument("kr_dual_lower_bound: witness is not 1-Lipschitz");
        best = std::max(best, std::abs(pair_against(psi, f1) - pair_against(psi, f2)));
    }
    return best;
}

EstimateSuite estimate_suite(const Trajectory& traj, int snapshot_count) {
    EstimateSuite s;
    s.phi_bar = traj.phi_bar;
    s.c0 = traj.potential.c0;
    s.c2 = traj.potential.c2;
    s.T = traj.duration();
    s.applicable = !traj.interaction && traj.potential.strict && traj.potential.c0 > 0.0;
    if (!s.applicable || traj.steps() == 0) return s;

    const int n = traj.n();
    const int K = traj.steps();
    const double tau = traj.tau;

    double second_moment = 0.0;
    for (int k = 1; k <= K; ++k) {
        double m = 0.0;
        for (double xi : traj.states[static_cast<std::size_t>(k)].x) m += xi * xi;
        second_moment = std::max(second_moment, m / n);
    }
    double movement = 0.0, increments = 0.0, multipliers = 0.0;
    for (int k = 0; k < K; ++k) {
        const auto& a = traj.states[static_cast<std::size_t>(k)].x;
        const auto& b = traj.states[static_cast<std::size_t>(k) + 1].x;
        const auto& lam = traj.multipliers[static_cast<std::size_t>(k)].lambda;
        double mv = 0.0, inc = 0.0, ml = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = (b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]) / tau;
            mv += v * v;
            const double dl = n * (lam[static_cast<std::size_t>(i) + 1] - lam[static_cast<std::size_t>(i)]);
            inc += dl * dl;
            ml += lam[static_cast<std::size_t>(i) + 1] * lam[static_cast<std::size_t>(i) + 1];
        }
        movement += tau * mv / n;
        increments += tau * inc / n;
        multipliers += tau * ml / n;
    }

    const double pressure_rhs = 4.0 * s.c2 * s.c2 * s.T * (1.0 + s.phi_bar / s.c0) + 4.0 * s.phi_bar;
    auto add = [&s](const std::string& name, double lhs, double rhs) {
        EstimateRecord r{name, lhs, rhs, rhs - lhs, lhs <= rhs * (1.0 + 1e-12) + 1e-12};
        s.all_pass = s.all_pass && r.pass;
        s.records.push_back(std::move(r));
    };
    add("second_moment", second_moment, s.phi_bar / s.c0);
    add("movement", movement, 2.0 * s.phi_bar);
    add("multiplier_increments", increments, pressure_rhs);
    add("multipliers", multipliers, pressure_rhs);

    // Hoelder-in-time control of the flow of empirical measures over the
    // snapshot grid, in the squared transport metric per unit time
    double equi = 0.0;
    std::vector<int> snaps;
    for (int j = 0; j < snapshot_count; ++j)
        snaps.push_back(static_cast<int>(std::llround(static_cast<double>(j) * K / (snapshot_count - 1))));
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    for (std::size_t aa = 0; aa < snaps.size(); ++aa)
        for (std::size_t bb = aa + 1; bb < snaps.size(); ++bb) {
            const int ka = snaps[aa], kb = snaps[bb];
            double w2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = traj.states[static_cast<std::size_t>(kb)].x[static_cast<std::size_t>(i)] -
                                 traj.states[static_cast<std::size_t>(ka)].x[static_cast<std::size_t>(i)];
                w2 += d * d;
            }
            equi = std::max(equi, w2 / n / ((kb - ka) * tau));
        }
    add("time_equicontinuity", equi, 2.0 * s.phi_bar);
    return s;
}

std::string estimate_suite_json(const EstimateSuite& s) {
    nlohmann::json j;
    j["phi_bar"] = s.phi_bar;
    j["c0"] = s.c0;
    j["c2"] = s.c2;
    j["T"] = s.T;
    j["applicable"] = s.applicable;
    j["all_pass"] = s.all_pass;
    j["records"] = nlohmann::json::array();
    for (const EstimateRecord& r : s.records)
        j["records"].push_back(
            {{"name", r.name}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"margin", r.margin}, {"pass", r.pass}});
    return j.dump(2);
}

}  // namespace congest1d
