#include "congest1d/jko.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace congest1d {

namespace {

// Pool-adjacent-violators for the nondecreasing cone, uniform weights.
std::vector<double> pav_nondecreasing(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> sum(n), mean(n);
    std::vector<int> count(n);
    std::size_t top = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sum[top] = v[i];
        count[top] = 1;
        mean[top] = v[i];
        ++top;
        while (top >= 2 && mean[top - 1] < mean[top - 2]) {
            sum[top - 2] += sum[top - 1];
            count[top - 2] += count[top - 1];
            mean[top - 2] = sum[top - 2] / count[top - 2];
            --top;
        }
    }
    std::vector<double> out(n);
    std::size_t k = 0;
    for (std::size_t b = 0; b < top; ++b)
        for (int c = 0; c < count[b]; ++c) out[k++] = mean[b];
    return out;
}

struct Objective {
    const Potential& p;
    const InteractionKernel* w;
    const std::vector<double>& xk;
    double tau;
    int n;

    double value(const std::vector<double>& x) const {
        const double invn = 1.0 / n;
        double e = 0.0, move = 0.0;
        for (int i = 0; i < n; ++i) {
            e += p.value(x[static_cast<std::size_t>(i)]);
            const double d = x[static_cast<std::size_t>(i)] - xk[static_cast<std::size_t>(i)];
            move += d * d;
        }
        double total = e * invn + move / (2.0 * n * tau);
        if (w) {
            double we = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    we += w->value(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
            total += we / (2.0 * static_cast<double>(n) * n);
        }
        return total;
    }

    // phi'(x_i) + (1/N) sum_j W'(x_i - x_j), without the movement term
    double drift_term(const std::vector<double>& x, int i) const {
        double d = p.grad(x[static_cast<std::size_t>(i)]);
        if (w) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += w->grad(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
            d += s / n;
        }
        return d;
    }

    void gradient(const std::vector<double>& x, std::vector<double>& g) const {
        g.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            g[static_cast<std::size_t>(i)] =
                (drift_term(x, i) +
                 (x[static_cast<std::size_t>(i)] - xk[static_cast<std::size_t>(i)]) / tau) /
                n;
    }
};

std::vector<int> contact_set(const std::vector<double>& x, double tol) {
    std::vector<int> a;
    const double g = 1.0 / static_cast<double>(x.size());
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (x[i + 1] - x[i] <= g + tol) a.push_back(static_cast<int>(i));
    return a;
}

// Safeguarded Newton for the 1-D block problem: all particles [a, b] glued
// at exact spacing 1/N and translated together.
double newton_block(const Objective& f, int a, int b, double z0) {
    const double g = 1.0 / f.n;
    auto dh = [&](double z) {
        double s = 0.0;
        for (int i = a; i <= b; ++i) {
            const double xi = z + (i - a) * g;
            s += (f.p.grad(xi) + (xi - f.xk[static_cast<std::size_t>(i)]) / f.tau) / f.n;
        }
        return s;
    };
    auto d2h = [&](double z) {
        double s = 0.0;
        for (int i = a; i <= b; ++i)
            s += (f.p.hess(z + (i - a) * g) + 1.0 / f.tau) / f.n;
        return s;
    };
    // bracket the root of the increasing function dh
    double lo = z0, hi = z0, dlo = dh(z0), dhi = dlo, radius = 0.1;
    for (int k = 0; k < 200 && dlo > 0.0; ++k) {
        lo -= radius;
        dlo = dh(lo);
        radius *= 2.0;
    }
    radius = 0.1;
    for (int k = 0; k < 200 && dhi < 0.0; ++k) {
        hi += radius;
        dhi = dh(hi);
        radius *= 2.0;
    }
    double z = std::clamp(z0, lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double d1 = dh(z);
        if (d1 > 0.0)
            hi = z;
        else
            lo = z;
        double step = -d1 / d2h(z);
        double zn = z + step;
        if (!(zn > lo) || !(zn < hi)) zn = 0.5 * (lo + hi);
        if (std::abs(zn - z) <= 4e-16 * (1.0 + std::abs(z))) {
            z = zn;
            break;
        }
        z = zn;
    }
    return z;
}

struct BlockPartition {
    // block b spans particles [start[b], start[b+1])
    std::vector<int> start;  // size B+1, start[0] = 0, start[B] = n
    std::vector<double> pos;  // position of each block's first particle
};

BlockPartition blocks_from_contacts(const std::vector<double>& x, double tol) {
    BlockPartition bp;
    const int n = static_cast<int>(x.size());
    const double g = 1.0 / n;
    bp.start.push_back(0);
    for (int i = 0; i + 1 < n; ++i)
        if (x[static_cast<std::size_t>(i) + 1] - x[static_cast<std::size_t>(i)] > g + tol)
            bp.start.push_back(i + 1);
    bp.start.push_back(n);
    for (std::size_t b = 0; b + 1 < bp.start.size(); ++b)
        bp.pos.push_back(x[static_cast<std::size_t>(bp.start[b])]);
    return bp;
}

void rebuild_positions(const BlockPartition& bp, int n, std::vector<double>& x) {
    const double g = 1.0 / n;
    for (std::size_t b = 0; b + 1 < bp.start.size(); ++b)
        for (int i = bp.start[b]; i < bp.start[b + 1]; ++i)
            x[static_cast<std::size_t>(i)] = bp.pos[b] + (i - bp.start[b]) * g;
}

}  // namespace

std::vector<double> project_to_cone(const std::vector<double>& y) {
    const std::size_t n = y.size();
    if (n == 0) return {};
    for (double v : y)
        if (!std::isfinite(v)) throw std::invalid_argument("project_to_cone: non-finite input");
    const double g = 1.0 / static_cast<double>(n);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = y[i] - static_cast<double>(i) * g;
    u = pav_nondecreasing(u);
    for (std::size_t i = 0; i < n; ++i) u[i] += static_cast<double>(i) * g;
    return u;
}

std::pair<MultiplierVector, double> recover_multipliers(const ParticleConfig& Xk,
                                                        const ParticleConfig& Xk1,
                                                        const Potential& p, double tau,
                                                        const InteractionKernel* w) {
    const int n = Xk.n();
    if (Xk1.n() != n) throw std::invalid_argument("recover_multipliers: size mismatch");
    Objective f{p, w, Xk.x, tau, n};
    MultiplierVector m = MultiplierVector::zeros(n);
    double lam = 0.0;
    for (int i = 0; i < n; ++i) {
        lam -= (f.drift_term(Xk1.x, i) +
                (Xk1.x[static_cast<std::size_t>(i)] - Xk.x[static_cast<std::size_t>(i)]) / tau) /
               n;
        m.lambda[static_cast<std::size_t>(i) + 1] = lam;
    }
    const double raw = std::abs(lam);
    m.lambda.back() = 0.0;
    return {std::move(m), raw};
}

double check_slackness(const ParticleConfig& X, const MultiplierVector& L) {
    const int n = X.n();
    const double g = X.min_gap();
    double worst = 0.0;
    for (int i = 1; i < n; ++i) {
        const double gap = X.x[static_cast<std::size_t>(i)] - X.x[static_cast<std::size_t>(i) - 1];
        worst = std::max(worst, std::abs(L.lambda[static_cast<std::size_t>(i)] * (gap - g)));
    }
    return worst;
}

double configuration_energy(const ParticleConfig& X, const Potential& p,
                            const InteractionKernel* w) {
    const int n = X.n();
    double e = 0.0;
    for (double xi : X.x) e += p.value(xi);
    e /= n;
    if (w) {
        double we = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                we += w->value(X.x[static_cast<std::size_t>(i)] - X.x[static_cast<std::size_t>(j)]);
        e += we / (2.0 * static_cast<double>(n) * n);
    }
    return e;
}

JkoResult jko_step(const ParticleConfig& Xk, const Potential& p, const InteractionKernel* w,
                   double tau, const JkoOptions& opt) {
    const auto t_start = std::chrono::steady_clock::now();
    const int n = Xk.n();
    if (n < 1) throw std::invalid_argument("jko_step: empty configuration");
    if (!Xk.in_cone(1e-12)) throw std::invalid_argument("jko_step: input violates the spacing constraint");
    const double c2_eff = p.c2 + (w ? 2.0 * w->curvature_bound : 0.0);
    if (!(tau > 0.0)) throw std::invalid_argument("jko_step: tau must be positive");
    if (tau * c2_eff >= 1.0)
        throw std::invalid_argument("jko_step: tau too large, objective no longer strongly convex");

    Objective f{p, w, Xk.x, tau, n};
    const double energy_before = configuration_energy(Xk, p, w);

    std::vector<double> x = Xk.x;
    if (opt.guess_perturbation > 0.0) {
        std::mt19937_64 rng(opt.perturbation_seed);
        std::uniform_real_distribution<double> u(-opt.guess_perturbation, opt.guess_perturbation);
        for (double& xi : x) xi += u(rng);
        x = project_to_cone(x);
    }

    const double lip = (1.0 / tau + c2_eff) / n;
    double eta = 1.0 / lip;
    // residual in the units of the optimality system rows (phi' + v)
    const double tol_nat = w ? std::min(opt.kkt_tol_per_particle * n, 3e-11)
                             : opt.kkt_tol_per_particle * n;
    const int max_iter = opt.max_iterations_base + 10 * n;
    const bool polish = (w == nullptr);

    double fx = f.value(x);
    std::vector<double> g, trial;
    std::vector<int> prev_active;
    int stable = 0;
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();

    ParticleConfig best;
    MultiplierVector best_mult;
    StepReport report;

    auto natural_residual = [&](const std::vector<double>& xs) {
        f.gradient(xs, g);
        std::vector<double> step(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) step[i] = xs[i] - eta * g[i];
        step = project_to_cone(step);
        double r = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            r = std::max(r, std::abs(xs[i] - step[i]));
        return r * n / eta;
    };

    auto try_accept = [&](const std::vector<double>& xs) -> bool {
        ParticleConfig cand{xs};
        if (!cand.in_cone(1e-12)) return false;
        auto [mult, raw] = recover_multipliers(Xk, cand, p, tau, w);
        if (raw > 0.5 * opt.consistency_tol) return false;
        if (mult.min_value() < -0.5 * opt.dual_tol) return false;
        const double slack = check_slackness(cand, mult);
        if (slack > 0.5e-8) return false;
        const double r = natural_residual(xs);
        if (r > tol_nat) return false;
        best = std::move(cand);
        best_mult = std::move(mult);
        report.kkt_residual = r;
        report.slackness_residual = slack;
        report.multiplier_residual = raw;
        return true;
    };

    auto polish_blocks = [&](std::vector<double>& xs) {
        BlockPartition bp = blocks_from_contacts(xs, opt.active_gap_tol);
        const double g1 = 1.0 / n;
        const int max_rounds = 6 * n + 60;
        for (int round = 0; round < max_rounds; ++round) {
            for (std::size_t b = 0; b + 1 < bp.start.size(); ++b)
                bp.pos[b] = newton_block(f, bp.start[b], bp.start[b + 1] - 1, bp.pos[b]);
            // merge any pair of blocks that came out overlapping
            bool merged = false;
            BlockPartition next;
            next.start.push_back(0);
            std::size_t b = 0;
            while (b + 1 < bp.start.size()) {
                double pos = bp.pos[b];
                std::size_t e = b;
                while (e + 2 < bp.start.size()) {
                    const double end_of_e = bp.pos[e] + (bp.start[e + 1] - 1 - bp.start[e]) * g1;
                    if (bp.pos[e + 1] - end_of_e < g1 - 1e-15) {
                        ++e;
                        merged = true;
                    } else {
                        break;
                    }
                }
                next.start.push_back(bp.start[e + 1]);
                next.pos.push_back(pos);
                b = e + 1;
            }
            if (merged) {
                bp = std::move(next);
                continue;
            }
            rebuild_positions(bp, n, xs);
            // split where an interior contact carries a clearly negative pressure
            auto [mult, raw] = recover_multipliers(Xk, ParticleConfig{xs}, p, tau, w);
            (void)raw;
            int split_at = -1;
            double most_negative = -1e-11;
            for (std::size_t bb = 0; bb + 1 < bp.start.size(); ++bb)
                for (int i = bp.start[bb] + 1; i < bp.start[bb + 1]; ++i)
                    if (mult.lambda[static_cast<std::size_t>(i)] < most_negative) {
                        most_negative = mult.lambda[static_cast<std::size_t>(i)];
                        split_at = i;
                    }
            if (split_at < 0) return;
            BlockPartition split;
            split.start.push_back(0);
            for (std::size_t bb = 0; bb + 1 < bp.start.size(); ++bb) {
                if (split_at > bp.start[bb] && split_at < bp.start[bb + 1]) {
                    split.start.push_back(split_at);
                    split.pos.push_back(bp.pos[bb]);
                    split.pos.push_back(bp.pos[bb] + (split_at - bp.start[bb]) * g1);
                } else {
                    split.pos.push_back(bp.pos[bb]);
                }
                split.start.push_back(bp.start[bb + 1]);
            }
            bp = std::move(split);
        }
        rebuild_positions(bp, n, xs);
    };

    bool accepted = false;
    for (; iterations < max_iter; ++iterations) {
        f.gradient(x, g);
        // proximal-gradient trial with backtracking (declared curvature can
        // underestimate a table potential)
        double fz = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            trial.resize(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - eta * g[i];
            trial = project_to_cone(trial);
            double lin = 0.0, quad = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double d = trial[i] - x[i];
                lin += g[i] * d;
                quad += d * d;
            }
            fz = f.value(trial);
            if (fz <= fx + lin + quad / (2.0 * eta) + 1e-15 * (1.0 + std::abs(fx))) break;
            eta *= 0.5;
        }
        double move = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) move = std::max(move, std::abs(trial[i] - x[i]));
        residual = move * n / eta;
        x.swap(trial);
        fx = fz;

        std::vector<int> active = contact_set(x, opt.active_gap_tol);
        stable = (active == prev_active) ? stable + 1 : 0;
        prev_active = std::move(active);

        const bool try_now = residual <= tol_nat || (polish && stable >= opt.polish_after_stable);
        if (!try_now) continue;
        if (polish) {
            polish_blocks(x);
            fx = f.value(x);
        }
        if (try_accept(x)) {
            accepted = true;
            ++iterations;
            break;
        }
        stable = 0;
    }

    if (!accepted) {
        // last chance at the current iterate before giving up
        if (!try_accept(x)) {
            StepReport r;
            r.energy_before = energy_before;
            r.energy_after = f.value(x);
            r.inner_iterations = iterations;
            r.kkt_residual = std::isfinite(residual) ? residual : 0.0;
            throw JkoConvergenceError("jko_step: inner solver did not reach tolerance",
                                      ParticleConfig{x}, r);
        }
    }

    report.energy_before = energy_before;
    report.energy_after = configuration_energy(best, p, w);
    double move2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = best.x[static_cast<std::size_t>(i)] - Xk.x[static_cast<std::size_t>(i)];
        move2 += d * d;
    }
    report.movement = move2 / (2.0 * n * tau);
    report.active_set = contact_set(best.x, opt.active_gap_tol);
    report.inner_iterations = iterations;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(best), std::move(best_mult), std::move(report)};
}

}  // namespace congest1d
