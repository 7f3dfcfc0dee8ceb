#include "congest1d/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace congest1d {

namespace {

template <typename F>
void parallel_for(int jobs, int workers, F&& body) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, jobs));
    if (workers == 1) {
        for (int j = 0; j < jobs; ++j) body(j);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (int j = next.fetch_add(1); j < jobs; j = next.fetch_add(1)) body(j);
        });
    for (std::thread& t : pool) t.join();
}

double effective_curvature(const ExperimentConfig& cfg) {
    return cfg.potential.c2 + (cfg.interaction ? 2.0 * cfg.interaction->curvature_bound : 0.0);
}

std::vector<BumpTestFunction> bump_family_for(const MacroDensity& rho0) {
    const double c = 0.5 * (rho0.xi_left() + rho0.xi_right());
    const double R = 0.5 * (rho0.xi_right() - rho0.xi_left()) + 2.0;
    return standard_bump_family(c, R);
}

std::vector<int> snapshot_steps(int K, int snapshots) {
    std::vector<int> s;
    if (K == 0) return {0};
    for (int j = 0; j < snapshots; ++j)
        s.push_back(static_cast<int>(std::llround(static_cast<double>(j) * K / (snapshots - 1))));
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

double mean_weak_residual(const Trajectory& traj, const std::vector<BumpTestFunction>& family) {
    if (traj.steps() == 0) return 0.0;
    double acc = 0.0;
    for (int k = 0; k < traj.steps(); ++k) {
        double worst = 0.0;
        for (const BumpTestFunction& psi : family)
            worst = std::max(worst, weak_form_residual(traj, psi, k));
        acc += worst;
    }
    return acc / traj.steps();
}

double pressure_interpolant_gap_l2t(const Trajectory& traj) {
    // sup_x |p - p_tilde| at one time equals half the largest multiplier
    // increment across a ramp
    double acc = 0.0;
    for (const MultiplierVector& m : traj.multipliers) {
        const double s = 0.5 * lambda_interpolant_sup_gap(m);
        acc += traj.tau * s * s;
    }
    return std::sqrt(acc);
}

void fill_common_record(SweepRecord& rec, const Trajectory& traj,
                        const std::vector<BumpTestFunction>& family, int snapshots) {
    rec.weak_residual = mean_weak_residual(traj, family);
    rec.lambda_gap_l2t = lambda_interpolant_gap_L2t(traj);
    rec.pressure_gap_l2t = pressure_interpolant_gap_l2t(traj);
    rec.slackness_integral = slackness_integral(traj);
    const ParticleConfig& fin = traj.states.back();
    rec.emp_hist_w1 = wasserstein_p(empirical_quantile(fin), histogram_quantile(fin), 1.0);
    rec.emp_hist_w1_closed = emp_vs_hist_closed_form(fin, 1.0);
    rec.estimates = estimate_suite(traj, snapshots);
    double secs = 0.0;
    for (const StepReport& r : traj.reports) {
        secs += r.wall_seconds;
        rec.max_inner_iterations = std::max(rec.max_inner_iterations, r.inner_iterations);
    }
    rec.mean_step_seconds = traj.steps() > 0 ? secs / traj.steps() : 0.0;
}

double sup_snapshot_w1(const Trajectory& a, const Trajectory& b, int snapshots) {
    const int K = std::min(a.steps(), b.steps());
    double worst = 0.0;
    for (int k : snapshot_steps(K, snapshots)) {
        const double d = wasserstein_p(empirical_quantile(a.states[static_cast<std::size_t>(k)]),
                                       empirical_quantile(b.states[static_cast<std::size_t>(k)]), 1.0);
        worst = std::max(worst, d);
    }
    return worst;
}

double lambda_l2_difference(const Trajectory& a, const Trajectory& b) {
    const int K = std::min(a.steps(), b.steps());
    const int na = a.n(), nb = b.n();
    std::vector<double> grid;
    for (int i = 0; i <= na; ++i) grid.push_back(static_cast<double>(i) / na);
    for (int i = 0; i <= nb; ++i) grid.push_back(static_cast<double>(i) / nb);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
        LagrangianInterpolant la{LagrangianInterpolant::Kind::lambda_piecewise_linear, na,
                                 a.multipliers[static_cast<std::size_t>(k)].lambda};
        LagrangianInterpolant lb{LagrangianInterpolant::Kind::lambda_piecewise_linear, nb,
                                 b.multipliers[static_cast<std::size_t>(k)].lambda};
        double cell = 0.0;
        for (std::size_t m = 0; m + 1 < grid.size(); ++m) {
            const double h = grid[m + 1] - grid[m];
            const double d0 = la(grid[m]) - lb(grid[m]);
            const double d1 = la(grid[m + 1]) - lb(grid[m + 1]);
            cell += h * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
        }
        acc += a.tau * cell;
    }
    return std::sqrt(acc);
}

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.n_values.empty()) throw std::invalid_argument("config: empty N list");
    if (cfg.tau_values.empty()) throw std::invalid_argument("config: empty tau list");
    for (int n : cfg.n_values)
        if (n < 2) throw std::invalid_argument("config: N must be at least 2");
    const double c2e = effective_curvature(cfg);
    for (double tau : cfg.tau_values) {
        if (!(tau > 0.0)) throw std::invalid_argument("config: tau must be positive");
        if (c2e > 0.0 && tau > 0.5 / c2e)
            throw std::invalid_argument("config: tau exceeds the 0.5/c2 step-size guard");
    }
    if (cfg.T < 0.0) throw std::invalid_argument("config: negative horizon");
}

ExperimentConfig benchmark_config(const std::string& name) {
    ExperimentConfig cfg;
    cfg.scenario = name;
    if (name == "quadratic") {
        cfg.potential = quadratic_potential(0.0, 1.0);
        cfg.rho0 = uniform_density(-2.0, 2.0);
    } else if (name == "double_well") {
        cfg.potential = double_well_potential(4.0, 1.0);
        cfg.rho0 = uniform_density(-2.0, 2.0);
    } else {
        throw std::invalid_argument("benchmark_config: unknown scenario '" + name + "'");
    }
    cfg.n_values = {16, 32, 64};
    cfg.tau_values = {1e-3};
    cfg.T = 1.0;
    return cfg;
}

SweepResult sweep_tau(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.tau_values.size() < 2)
        throw std::invalid_argument("sweep_tau: need at least two step sizes");
    for (std::size_t i = 0; i + 1 < cfg.tau_values.size(); ++i)
        if (std::abs(cfg.tau_values[i + 1] - 0.5 * cfg.tau_values[i]) > 1e-12 * cfg.tau_values[i])
            throw std::invalid_argument("sweep_tau: step sizes must halve");

    const int n = cfg.n_values.front();
    const ParticleConfig X0 = sample_particles(quantile_of_density(cfg.rho0), n);
    const auto family = bump_family_for(cfg.rho0);

    const int jobs = static_cast<int>(cfg.tau_values.size());
    std::vector<Trajectory> runs(static_cast<std::size_t>(jobs));
    parallel_for(jobs, cfg.workers, [&](int j) {
        runs[static_cast<std::size_t>(j)] = integrate(X0, cfg.potential, cfg.kernel(),
                                                      cfg.tau_values[static_cast<std::size_t>(j)],
                                                      cfg.T, cfg.jko);
    });

    SweepResult res;
    for (int j = 0; j < jobs; ++j) {
        const Trajectory& traj = runs[static_cast<std::size_t>(j)];
        if (!traj.completed) {
            res.pass = false;
            res.detail += "run tau=" + std::to_string(traj.tau) + " failed: " + traj.failure + "; ";
        }
        SweepRecord rec;
        rec.n = n;
        rec.tau = cfg.tau_values[static_cast<std::size_t>(j)];
        fill_common_record(rec, traj, family, cfg.snapshots);
        rec.cauchy_distance = quiet_nan();
        rec.lambda_l2_diff = quiet_nan();
        if (j + 1 < jobs) {
            rec.cauchy_distance = wasserstein_p(
                empirical_quantile(traj.states.back()),
                empirical_quantile(runs[static_cast<std::size_t>(j) + 1].states.back()), 2.0);
        }
        if (rec.estimates.applicable && !rec.estimates.all_pass) {
            res.pass = false;
            res.detail += "a priori estimate violated at tau=" + std::to_string(rec.tau) + "; ";
        }
        res.records.push_back(std::move(rec));
    }

    for (std::size_t j = 0; j + 2 < res.records.size(); ++j)
        if (!(res.records[j + 1].cauchy_distance <= res.records[j].cauchy_distance)) {
            res.pass = false;
            res.detail += "Cauchy column not decreasing; ";
        }
    // residual halves with tau
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (const SweepRecord& r : res.records) {
        if (!(r.weak_residual > 0.0)) continue;
        const double lx = std::log(r.tau), ly = std::log(r.weak_residual);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    res.residual_order =
        m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    for (std::size_t j = 0; j + 1 < res.records.size(); ++j) {
        const double prev = res.records[j].weak_residual;
        const double curr = res.records[j + 1].weak_residual;
        if (prev <= 1e-14 && curr <= 1e-14) continue;  // nothing moves, nothing to fit
        const double ratio = curr / prev;
        if (!(ratio >= 0.25 && ratio <= 0.75)) {
            res.pass = false;
            res.detail += "residual ratio " + std::to_string(ratio) + " outside [0.25, 0.75]; ";
        }
    }
    return res;
}

SweepResult sweep_n(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.n_values.size() < 2) throw std::invalid_argument("sweep_n: need at least two sizes");
    for (std::size_t i = 0; i + 1 < cfg.n_values.size(); ++i)
        if (cfg.n_values[i + 1] != 2 * cfg.n_values[i])
            throw std::invalid_argument("sweep_n: sizes must double");

    const double tau = cfg.tau_values.front();
    const QuantileFn q0 = quantile_of_density(cfg.rho0);
    const auto family = bump_family_for(cfg.rho0);

    const int jobs = static_cast<int>(cfg.n_values.size());
    std::vector<Trajectory> runs(static_cast<std::size_t>(jobs));
    parallel_for(jobs, cfg.workers, [&](int j) {
        const ParticleConfig X0 = sample_particles(q0, cfg.n_values[static_cast<std::size_t>(j)]);
        runs[static_cast<std::size_t>(j)] =
            integrate(X0, cfg.potential, cfg.kernel(), tau, cfg.T, cfg.jko);
    });

    SweepResult res;
    for (int j = 0; j < jobs; ++j) {
        const Trajectory& traj = runs[static_cast<std::size_t>(j)];
        if (!traj.completed) {
            res.pass = false;
            res.detail += "run N=" + std::to_string(traj.n()) + " failed: " + traj.failure + "; ";
        }
        SweepRecord rec;
        rec.n = cfg.n_values[static_cast<std::size_t>(j)];
        rec.tau = tau;
        fill_common_record(rec, traj, family, cfg.snapshots);
        rec.cauchy_distance = quiet_nan();
        rec.lambda_l2_diff = quiet_nan();
        if (j + 1 < jobs) {
            rec.cauchy_distance =
                sup_snapshot_w1(traj, runs[static_cast<std::size_t>(j) + 1], cfg.snapshots);
            rec.lambda_l2_diff = lambda_l2_difference(traj, runs[static_cast<std::size_t>(j) + 1]);
        }
        if (std::abs(rec.emp_hist_w1 - rec.emp_hist_w1_closed) > 1e-10) {
            res.pass = false;
            res.detail += "closed-form W1 mismatch at N=" + std::to_string(rec.n) + "; ";
        }
        if (rec.estimates.applicable && !rec.estimates.all_pass) {
            res.pass = false;
            res.detail += "a priori estimate violated at N=" + std::to_string(rec.n) + "; ";
        }
        res.records.push_back(std::move(rec));
    }
    for (std::size_t j = 0; j + 2 < res.records.size(); ++j)
        if (!(res.records[j + 1].cauchy_distance < res.records[j].cauchy_distance)) {
            res.pass = false;
            res.detail += "Cauchy column not strictly decreasing; ";
        }
    return res;
}

namespace {

double fitted_decay_exponent(const std::vector<double>& times, const std::vector<double>& means) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    const double floor_value = std::max(1e-8, std::abs(means.front()) * 1e-3);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::abs(means[k]) < floor_value) break;
        const double lx = times[k], ly = std::log(std::abs(means[k]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    if (m < 3) return 0.0;
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double state_mean(const ParticleConfig& c) {
    double s = 0.0;
    for (double xi : c.x) s += xi;
    return s / c.n();
}

}  // namespace

SteadyStateReport steady_state_benchmark(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (std::abs(cfg.potential.c2 - 2.0) > 1e-9 || std::abs(cfg.potential.grad(0.0)) > 1e-12)
        throw std::invalid_argument("steady_state_benchmark: expects the unit quadratic potential");
    const double tau = cfg.tau_values.front();
    double T = std::max(cfg.T, 2.0 * 5.0 / cfg.potential.c2);
    T = std::ceil(T / tau) * tau;
    const QuantileFn q0 = quantile_of_density(cfg.rho0);

    SteadyStateReport report;
    report.records.resize(cfg.n_values.size());
    parallel_for(static_cast<int>(cfg.n_values.size()), cfg.workers, [&](int j) {
        const int n = cfg.n_values[static_cast<std::size_t>(j)];
        Trajectory traj = integrate(sample_particles(q0, n), cfg.potential, nullptr, tau, T, cfg.jko);
        SteadyStateRecord rec;
        rec.n = n;
        rec.lattice_tolerance = std::max(10.0 * tau, 1e-3);
        const ParticleConfig& fin = traj.states.back();
        for (int i = 1; i <= n; ++i) {
            const double target = (i - 0.5 * (n + 1)) / n;
            rec.lattice_deviation = std::max(
                rec.lattice_deviation, std::abs(fin.x[static_cast<std::size_t>(i) - 1] - target));
        }
        const MultiplierVector& lam = traj.multipliers.back();
        double partial = 0.0;
        for (int i = 1; i < n; ++i) {
            partial += fin.x[static_cast<std::size_t>(i) - 1];
            rec.multiplier_mismatch =
                std::max(rec.multiplier_mismatch,
                         std::abs(lam.lambda[static_cast<std::size_t>(i)] + 2.0 * partial / n));
        }
        for (const MultiplierVector& m : traj.multipliers)
            rec.min_lambda = std::min(rec.min_lambda, m.min_value());

        std::vector<double> times, means;
        Trajectory* decay_source = &traj;
        Trajectory aux;
        if (std::abs(state_mean(traj.states.front())) < 1e-6) {
            // centered data has nothing to fit; rerun briefly with an offset
            ParticleConfig shifted = traj.states.front();
            for (double& xi : shifted.x) xi += 0.75;
            const double t_aux = std::ceil(std::min(T, 1.5) / tau) * tau;
            aux = integrate(shifted, cfg.potential, nullptr, tau, t_aux, cfg.jko);
            decay_source = &aux;
        }
        for (int k = 0; k <= decay_source->steps(); ++k) {
            times.push_back(k * tau);
            means.push_back(state_mean(decay_source->states[static_cast<std::size_t>(k)]));
        }
        rec.decay_exponent = fitted_decay_exponent(times, means);
        rec.pass = traj.completed && rec.lattice_deviation <= rec.lattice_tolerance &&
                   rec.multiplier_mismatch <= rec.lattice_tolerance && rec.min_lambda >= -1e-9 &&
                   std::abs(rec.decay_exponent + 2.0) <= 0.2;
        report.records[static_cast<std::size_t>(j)] = std::move(rec);
    });
    for (const SteadyStateRecord& r : report.records) report.pass = report.pass && r.pass;
    return report;
}

UniquenessReport uniqueness_probe(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const int n = cfg.n_values.front();
    const double tau = cfg.tau_values.front();
    const ParticleConfig X0 = sample_particles(quantile_of_density(cfg.rho0), n);

    Trajectory a = integrate(X0, cfg.potential, cfg.kernel(), tau, cfg.T, cfg.jko);
    Trajectory a2 = integrate(X0, cfg.potential, cfg.kernel(), tau, cfg.T, cfg.jko);
    JkoOptions perturbed = cfg.jko;
    perturbed.guess_perturbation = 1e-7;
    perturbed.perturbation_seed = cfg.seed + 999;
    Trajectory b = integrate(X0, cfg.potential, cfg.kernel(), tau, cfg.T, perturbed);

    UniquenessReport rep;
    rep.identical_seed_bitwise = a.states.size() == a2.states.size();
    for (std::size_t k = 0; rep.identical_seed_bitwise && k < a.states.size(); ++k)
        rep.identical_seed_bitwise = a.states[k].x == a2.states[k].x;

    double d2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = a.states.back().x[static_cast<std::size_t>(i)] -
                         b.states.back().x[static_cast<std::size_t>(i)];
        d2 += d * d;
    }
    rep.perturbed_difference = std::sqrt(d2 / n);
    rep.tolerance = 10.0 * (cfg.jko.kkt_tol_per_particle * n) * a.steps();

    // projection must not depend on the pooling order: compare against the
    // same projection computed through the order-reversing isometry
    std::mt19937_64 rng(cfg.seed + 7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> y(static_cast<std::size_t>(n));
        for (double& v : y) v = u(rng);
        std::vector<double> z1 = project_to_cone(y);
        std::vector<double> rev(y.rbegin(), y.rend());
        for (double& v : rev) v = -v;
        std::vector<double> z2 = project_to_cone(rev);
        std::reverse(z2.begin(), z2.end());
        for (double& v : z2) v = -v;
        for (int i = 0; i < n; ++i)
            rep.pav_tiebreak_difference =
                std::max(rep.pav_tiebreak_difference,
                         std::abs(z1[static_cast<std::size_t>(i)] - z2[static_cast<std::size_t>(i)]));
    }
    rep.pass = a.completed && b.completed && rep.identical_seed_bitwise &&
               rep.perturbed_difference <= rep.tolerance && rep.pav_tiebreak_difference <= 1e-12;
    return rep;
}

MacroDensity random_block_density(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nblocks(1, 5);
    std::uniform_real_distribution<double> height(0.2, 0.95);
    std::uniform_real_distribution<double> width(0.3, 1.5);
    std::uniform_real_distribution<double> gap(0.2, 1.0);
    std::uniform_real_distribution<double> origin(-2.0, 0.0);

    const int m = nblocks(rng);
    std::vector<double> h(static_cast<std::size_t>(m)), w(static_cast<std::size_t>(m));
    double mass = 0.0;
    for (int b = 0; b < m; ++b) {
        h[static_cast<std::size_t>(b)] = height(rng);
        w[static_cast<std::size_t>(b)] = width(rng);
        mass += h[static_cast<std::size_t>(b)] * w[static_cast<std::size_t>(b)];
    }
    for (double& wi : w) wi /= mass;
    // absorb the rounding into the last block so the mass is exactly 1
    double partial = 0.0;
    for (int b = 0; b + 1 < m; ++b) partial += h[static_cast<std::size_t>(b)] * w[static_cast<std::size_t>(b)];
    w[static_cast<std::size_t>(m) - 1] = (1.0 - partial) / h[static_cast<std::size_t>(m) - 1];

    std::vector<double> breakpoints{origin(rng)};
    std::vector<double> values;
    for (int b = 0; b < m; ++b) {
        values.push_back(h[static_cast<std::size_t>(b)]);
        breakpoints.push_back(breakpoints.back() + w[static_cast<std::size_t>(b)]);
        if (b + 1 < m) {
            values.push_back(0.0);
            breakpoints.push_back(breakpoints.back() + gap(rng));
        }
    }
    return make_density(std::move(breakpoints), std::move(values));
}

RandomSuiteOutcome run_random_scenarios(int count, unsigned seed, bool include_interaction) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    RandomSuiteOutcome out;
    for (int s = 0; s < count; ++s) {
        const MacroDensity rho0 = random_block_density(rng);
        std::uniform_int_distribution<int> nd(4, 40);
        const int n = nd(rng);
        Potential pot = u01(rng) < 0.5
                            ? quadratic_potential(-1.0 + 2.0 * u01(rng), 0.5 + 1.5 * u01(rng))
                            : double_well_potential(2.0 + 3.0 * u01(rng), 1.0);
        std::optional<InteractionKernel> kern;
        if (include_interaction && u01(rng) < 0.2)
            kern = u01(rng) < 0.5 ? quadratic_kernel() : gaussian_bump_kernel(0.5, 1.0);
        const double c2e = pot.c2 + (kern ? 2.0 * kern->curvature_bound : 0.0);
        const double tau = (0.5 / c2e) * (0.1 + 0.9 * u01(rng));
        std::uniform_int_distribution<int> kd(3, 12);
        const int K = kd(rng);

        ParticleConfig X = sample_particles(quantile_of_density(rho0), n);
        const double g = X.min_gap();
        for (int k = 0; k < K; ++k) {
            JkoResult r = jko_step(X, pot, kern ? &*kern : nullptr, tau);
            ++out.steps;
            double min_gap = std::numeric_limits<double>::infinity();
            for (int i = 0; i + 1 < n; ++i)
                min_gap = std::min(min_gap, r.config.x[static_cast<std::size_t>(i) + 1] -
                                                r.config.x[static_cast<std::size_t>(i)]);
            out.worst_gap_violation = std::max(out.worst_gap_violation, g - min_gap);
            out.min_lambda = std::min(out.min_lambda, r.multipliers.min_value());
            out.worst_boundary = std::max({out.worst_boundary, std::abs(r.multipliers.lambda.front()),
                                           std::abs(r.multipliers.lambda.back())});
            out.worst_slackness = std::max(out.worst_slackness, r.report.slackness_residual);
            out.worst_consistency = std::max(out.worst_consistency, r.report.multiplier_residual);
            out.worst_dissipation =
                std::max(out.worst_dissipation,
                         r.report.energy_after + r.report.movement - r.report.energy_before);
            X = std::move(r.config);
        }
        ++out.scenarios;
    }
    out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

namespace {

std::vector<MacroDensity> corpus_densities(unsigned seed) {
    std::vector<MacroDensity> corpus;
    corpus.push_back(uniform_density(0.0, 1.0));
    corpus.push_back(uniform_density(-2.0, 2.0));
    corpus.push_back(make_density({0.0, 2.0}, {0.5}));
    corpus.push_back(make_density({0.0, 0.5, 1.0, 1.5}, {1.0, 0.0, 1.0}));
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 4; ++k) corpus.push_back(random_block_density(rng));
    return corpus;
}

}  // namespace

int run_validation_suite(const ExperimentConfig& cfg, std::ostream& out) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok, const std::string& detail) {
        out << (ok ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty()) out << "  (" << detail << ")";
        out << '\n';
        if (!ok) ++failures;
    };
    std::ostringstream d;

    {
        const auto q = validate_potential(quadratic_potential(0.0, 1.0));
        const auto dw = validate_potential(double_well_potential());
        check("potential_bounds", q.pass && dw.pass, "");
        const auto kq = validate_kernel(quadratic_kernel());
        const auto kg = validate_kernel(gaussian_bump_kernel(0.5, 1.0));
        check("kernel_symmetry", kq.pass && kg.pass, "");
    }
    {
        bool ok = true;
        double worst_ratio = 0.0;
        for (const MacroDensity& rho : corpus_densities(cfg.seed)) {
            const QuantileFn q = quantile_of_density(rho);
            const double span = rho.xi_right() - rho.xi_left();
            for (int n : {4, 16, 64, 256}) {
                const ParticleConfig X = sample_particles(q, n);
                ok = ok && X.in_cone(1e-12);
                const double err = sampling_error_bound_check(q, X);
                ok = ok && err <= span / n + 1e-12;
                worst_ratio = std::max(worst_ratio, err / (span / n));
                ok = ok && std::abs(histogram_density(X).mass() - 1.0) <= 1e-12;
            }
        }
        d.str("");
        d << "worst error/bound ratio " << worst_ratio;
        check("sampling_bounds", ok, d.str());
    }
    RandomSuiteOutcome rnd = run_random_scenarios(40, cfg.seed);
    {
        d.str("");
        d << rnd.scenarios << " scenarios, " << rnd.steps << " steps";
        check("constraint_suite",
              rnd.worst_gap_violation <= 1e-12 && rnd.min_lambda >= -1e-9 &&
                  rnd.worst_boundary == 0.0 && rnd.worst_slackness <= 1e-8 &&
                  rnd.worst_consistency <= 1e-8,
              d.str());
        check("dissipation", rnd.worst_dissipation <= 1e-10, "");
    }
    {
        std::mt19937_64 rng(cfg.seed + 1);
        std::uniform_real_distribution<double> ug(0.0, 0.2);
        std::uniform_int_distribution<int> nd(2, 40);
        bool ok = true;
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            const int n = nd(rng);
            ParticleConfig X;
            double pos = -1.0;
            for (int i = 0; i < n; ++i) {
                pos += 1.0 / n + ug(rng);
                X.x.push_back(pos);
            }
            for (double p : {1.0, 2.0}) {
                const double a = emp_vs_hist_closed_form(X, p);
                const double b = wasserstein_p(empirical_quantile(X), histogram_quantile(X), p);
                worst = std::max(worst, std::abs(a - b));
                ok = ok && std::abs(a - b) <= 1e-10;
            }
        }
        d.str("");
        d << "worst |closed - quadrature| " << worst;
        check("wasserstein_closed_form", ok, d.str());
    }
    {
        Trajectory traj = integrate(
            sample_particles(quantile_of_density(benchmark_config("quadratic").rho0), 32),
            quadratic_potential(0.0, 1.0), nullptr, 1e-3, 0.25, cfg.jko);
        bool ok = traj.completed;
        double worst_pde = 0.0, worst_sat = 0.0;
        for (int k = 0; k < traj.steps(); ++k) {
            worst_pde = std::max(worst_pde, lagrangian_pde_residual(traj, (k + 0.5) * traj.tau));
            auto [pc, pl] = pressure_fields(traj.states[static_cast<std::size_t>(k) + 1],
                                            traj.multipliers[static_cast<std::size_t>(k)]);
            worst_sat = std::max(
                worst_sat,
                saturation_check(histogram_density(traj.states[static_cast<std::size_t>(k) + 1]), pc));
        }
        ok = ok && worst_pde <= 1e-6 && worst_sat <= 1e-8;
        ok = ok && max_step_displacement(traj) <= std::sqrt(traj.tau * traj.n() * traj.phi_bar);
        const EstimateSuite est = estimate_suite(traj, cfg.snapshots);
        ok = ok && est.applicable && est.all_pass;
        d.str("");
        d << "pde residual " << worst_pde << ", saturation " << worst_sat;
        check("trajectory_invariants", ok, d.str());
    }
    {
        ExperimentConfig ss = benchmark_config("quadratic");
        ss.rho0 = uniform_density(-1.0, 2.0);
        ss.n_values = {2, 3};
        ss.tau_values = {1e-3};
        ss.T = 5.0;
        ss.workers = cfg.workers;
        const SteadyStateReport rep = steady_state_benchmark(ss);
        check("steady_state", rep.pass, "");
    }
    {
        ExperimentConfig un = benchmark_config("quadratic");
        un.n_values = {24};
        un.tau_values = {2e-3};
        un.T = 0.25;
        un.seed = cfg.seed;
        const UniquenessReport rep = uniqueness_probe(un);
        d.str("");
        d << "perturbed diff " << rep.perturbed_difference << " <= " << rep.tolerance;
        check("uniqueness", rep.pass, d.str());
    }
    return failures;
}

MacroDensity density_from_spec(const std::string& spec) {
    if (spec.rfind("uniform:", 0) == 0) {
        const std::string args = spec.substr(8);
        const std::size_t comma = args.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("density spec: expected uniform:<a>,<b>");
        return uniform_density(std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1)));
    }
    std::ifstream in(spec);
    if (!in) throw std::invalid_argument("density spec: cannot open '" + spec + "'");
    nlohmann::json j;
    in >> j;
    return make_density(j.at("breakpoints").get<std::vector<double>>(),
                        j.at("values").get<std::vector<double>>());
}

namespace {

Potential potential_from_json(const nlohmann::json& j, bool strict) {
    const std::string kind = j.value("kind", "quadratic");
    Potential p;
    if (kind == "quadratic") {
        p = quadratic_potential(j.value("center", 0.0), j.value("scale", 1.0));
    } else if (kind == "double_well_confined") {
        p = double_well_potential(j.value("amplitude", 4.0), j.value("width", 1.0));
    } else if (kind == "custom-table") {
        std::ifstream in(j.at("file").get<std::string>());
        if (!in) throw std::invalid_argument("potential: cannot open table file");
        nlohmann::json t;
        in >> t;
        p = table_potential(t.at("x").get<std::vector<double>>(),
                            t.at("value").get<std::vector<double>>(),
                            t.at("grad").get<std::vector<double>>(),
                            t.at("hess").get<std::vector<double>>(), strict);
    } else {
        throw std::invalid_argument("potential: unknown kind '" + kind + "'");
    }
    p.strict = strict;
    return p;
}

std::optional<InteractionKernel> interaction_from_json(const nlohmann::json& j) {
    const std::string kind = j.value("kind", "none");
    if (kind == "none") return std::nullopt;
    if (kind == "quadratic") return quadratic_kernel();
    if (kind == "gaussian-bump")
        return gaussian_bump_kernel(j.value("amplitude", 0.5), j.value("width", 1.0));
    throw std::invalid_argument("interaction: unknown kind '" + kind + "'");
}

}  // namespace

ExperimentConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;

    ExperimentConfig cfg = benchmark_config(j.value("scenario", "quadratic"));
    cfg.strict_phi = j.value("strict_phi", true);
    if (j.contains("potential")) cfg.potential = potential_from_json(j["potential"], cfg.strict_phi);
    if (j.contains("interaction")) cfg.interaction = interaction_from_json(j["interaction"]);
    if (j.contains("rho0")) {
        if (j["rho0"].is_string())
            cfg.rho0 = density_from_spec(j["rho0"].get<std::string>());
        else if (j["rho0"].contains("kind") && j["rho0"]["kind"] == "uniform")
            cfg.rho0 = uniform_density(j["rho0"].value("a", -2.0), j["rho0"].value("b", 2.0));
        else
            cfg.rho0 = make_density(j["rho0"].at("breakpoints").get<std::vector<double>>(),
                                    j["rho0"].at("values").get<std::vector<double>>());
    }
    if (j.contains("N")) {
        if (j["N"].is_array())
            cfg.n_values = j["N"].get<std::vector<int>>();
        else
            cfg.n_values = {j["N"].get<int>()};
    }
    if (j.contains("tau")) {
        if (j["tau"].is_array())
            cfg.tau_values = j["tau"].get<std::vector<double>>();
        else
            cfg.tau_values = {j["tau"].get<double>()};
    }
    cfg.T = j.value("T", cfg.T);
    cfg.snapshots = j.value("snapshots", cfg.snapshots);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.out_dir = j.value("out", cfg.out_dir);
    return cfg;
}

void write_sweep_csv(const SweepResult& r, std::ostream& out) {
    out << "n,tau,cauchy,weak_residual,lambda_gap_l2t,pressure_gap_l2t,slackness_integral,"
           "emp_hist_w1,emp_hist_w1_closed,lambda_l2_diff,estimates_pass,mean_step_seconds,"
           "max_inner_iterations\n";
    for (const SweepRecord& rec : r.records)
        out << rec.n << ',' << rec.tau << ',' << rec.cauchy_distance << ',' << rec.weak_residual
            << ',' << rec.lambda_gap_l2t << ',' << rec.pressure_gap_l2t << ','
            << rec.slackness_integral << ',' << rec.emp_hist_w1 << ',' << rec.emp_hist_w1_closed
            << ',' << rec.lambda_l2_diff << ','
            << (rec.estimates.applicable ? (rec.estimates.all_pass ? "1" : "0") : "n/a") << ','
            << rec.mean_step_seconds << ',' << rec.max_inner_iterations << '\n';
}

std::string sweep_json(const SweepResult& r) {
    nlohmann::json j;
    j["pass"] = r.pass;
    j["residual_order"] = r.residual_order;
    if (!r.detail.empty()) j["detail"] = r.detail;
    j["records"] = nlohmann::json::array();
    for (const SweepRecord& rec : r.records) {
        nlohmann::json e;
        e["n"] = rec.n;
        e["tau"] = rec.tau;
        e["cauchy"] = rec.cauchy_distance;
        e["weak_residual"] = rec.weak_residual;
        e["lambda_gap_l2t"] = rec.lambda_gap_l2t;
        e["pressure_gap_l2t"] = rec.pressure_gap_l2t;
        e["slackness_integral"] = rec.slackness_integral;
        e["emp_hist_w1"] = rec.emp_hist_w1;
        e["emp_hist_w1_closed"] = rec.emp_hist_w1_closed;
        e["lambda_l2_diff"] = rec.lambda_l2_diff;
        e["estimates"] = nlohmann::json::parse(estimate_suite_json(rec.estimates));
        e["mean_step_seconds"] = rec.mean_step_seconds;
        e["max_inner_iterations"] = rec.max_inner_iterations;
        j["records"].push_back(std::move(e));
    }
    return j.dump(2);
}

}  // namespace congest1d
