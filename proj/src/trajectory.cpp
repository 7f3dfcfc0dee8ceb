#include "congest1d/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace congest1d {

namespace {

int step_index_for(const Trajectory& traj, double t) {
    // t in I_k = (k tau, (k+1) tau]; boundary times belong to the interval
    // that ends there
    const int K = traj.steps();
    int k = static_cast<int>(std::ceil(t / traj.tau - 1e-12)) - 1;
    return std::clamp(k, 0, K - 1);
}

}  // namespace

Trajectory integrate(const ParticleConfig& X0, const Potential& p, const InteractionKernel* w,
                     double tau, double T, const JkoOptions& opt) {
    if (!(tau > 0.0)) throw std::invalid_argument("integrate: tau must be positive");
    const long long K = std::llround(T / tau);
    if (K < 0 || std::abs(K * tau - T) > 1e-9 * std::max(1.0, T))
        throw std::invalid_argument("integrate: T must be an integral multiple of tau");

    Trajectory traj;
    traj.tau = tau;
    traj.potential = p;
    if (w) traj.interaction = *w;
    traj.states.push_back(X0);
    double pb = 0.0;
    for (double xi : X0.x) pb += p.value(xi);
    traj.phi_bar = pb / X0.n();

    JkoOptions step_opt = opt;
    for (long long k = 0; k < K; ++k) {
        if (opt.guess_perturbation > 0.0)
            step_opt.perturbation_seed = opt.perturbation_seed + static_cast<unsigned>(k);
        try {
            JkoResult r = jko_step(traj.states.back(), p, w, tau, step_opt);
            traj.states.push_back(std::move(r.config));
            traj.multipliers.push_back(std::move(r.multipliers));
            traj.reports.push_back(std::move(r.report));
        } catch (const JkoConvergenceError& e) {
            traj.completed = false;
            traj.failed_step = static_cast<int>(k);
            traj.failure = e.what();
            break;
        }
    }
    return traj;
}

TimeSlice eval_time_interpolants(const Trajectory& traj, double t) {
    const int K = traj.steps();
    const double T = traj.duration();
    if (t < 0.0 || t > T + 1e-12 * std::max(1.0, T))
        throw std::invalid_argument("eval_time_interpolants: time outside [0, T]");
    TimeSlice s;
    if (K == 0 || t == 0.0) {
        s.piecewise_constant = traj.states.front();
        s.piecewise_linear = traj.states.front();
        s.multipliers = K == 0 ? MultiplierVector::zeros(traj.n()) : traj.multipliers.front();
        return s;
    }
    const int k = step_index_for(traj, t);
    const ParticleConfig& a = traj.states[static_cast<std::size_t>(k)];
    const ParticleConfig& b = traj.states[static_cast<std::size_t>(k) + 1];
    s.piecewise_constant = b;
    s.piecewise_linear = a;
    const double theta = (t - k * traj.tau) / traj.tau;
    for (std::size_t i = 0; i < s.piecewise_linear.x.size(); ++i)
        s.piecewise_linear.x[i] = a.x[i] + theta * (b.x[i] - a.x[i]);
    s.multipliers = traj.multipliers[static_cast<std::size_t>(k)];
    return s;
}

double LagrangianInterpolant::operator()(double s) const {
    if (s < 0.0 || s > 1.0)
        throw std::invalid_argument("LagrangianInterpolant: argument outside [0,1]");
    switch (kind) {
        case Kind::x_piecewise_constant: {
            int i = static_cast<int>(std::ceil(s * n));
            i = std::clamp(i, 1, n);
            return nodes[static_cast<std::size_t>(i)];
        }
        case Kind::lambda_piecewise_constant: {
            int i = static_cast<int>(std::floor(s * n));
            i = std::clamp(i, 0, n - 1);
            return nodes[static_cast<std::size_t>(i)];
        }
        case Kind::x_piecewise_linear:
        case Kind::lambda_piecewise_linear: {
            int i = static_cast<int>(std::floor(s * n));
            i = std::clamp(i, 0, n - 1);
            const double s_i = static_cast<double>(i) / n;
            return nodes[static_cast<std::size_t>(i)] +
                   n * (nodes[static_cast<std::size_t>(i) + 1] - nodes[static_cast<std::size_t>(i)]) *
                       (s - s_i);
        }
    }
    return 0.0;
}

LagrangianInterpolants build_lagrangian_interpolants(const ParticleConfig& state,
                                                     const MultiplierVector& mult) {
    const int n = state.n();
    if (mult.n() != n)
        throw std::invalid_argument("build_lagrangian_interpolants: size mismatch");
    std::vector<double> xn(static_cast<std::size_t>(n) + 1);
    xn[0] = state.virtual_left();
    for (int i = 0; i < n; ++i) xn[static_cast<std::size_t>(i) + 1] = state.x[static_cast<std::size_t>(i)];

    LagrangianInterpolants out;
    out.x_const = {LagrangianInterpolant::Kind::x_piecewise_constant, n, xn};
    out.x_lin = {LagrangianInterpolant::Kind::x_piecewise_linear, n, xn};
    out.lambda_const = {LagrangianInterpolant::Kind::lambda_piecewise_constant, n, mult.lambda};
    out.lambda_lin = {LagrangianInterpolant::Kind::lambda_piecewise_linear, n, mult.lambda};
    return out;
}

double lagrangian_pde_residual(const Trajectory& traj, double t) {
    if (traj.steps() == 0) return 0.0;
    const int k = step_index_for(traj, t);
    const ParticleConfig& a = traj.states[static_cast<std::size_t>(k)];
    const ParticleConfig& b = traj.states[static_cast<std::size_t>(k) + 1];
    const MultiplierVector& m = traj.multipliers[static_cast<std::size_t>(k)];
    const int n = traj.n();
    const InteractionKernel* w = traj.kernel();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double drift = traj.potential.grad(b.x[static_cast<std::size_t>(i)]);
        if (w) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += w->grad(b.x[static_cast<std::size_t>(i)] - b.x[static_cast<std::size_t>(j)]);
            drift += s / n;
        }
        const double r = (b.x[static_cast<std::size_t>(i)] - a.x[static_cast<std::size_t>(i)]) / traj.tau +
                         drift +
                         n * (m.lambda[static_cast<std::size_t>(i) + 1] - m.lambda[static_cast<std::size_t>(i)]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double omega(const ParticleConfig& state, int i) {
    const int n = state.n();
    if (i < 0 || i >= n) throw std::invalid_argument("omega: index out of range");
    if (i == 0) return 2.0;
    return n * (state.x[static_cast<std::size_t>(i)] - state.x[static_cast<std::size_t>(i) - 1]);
}

double support_diameter(const ParticleConfig& state) {
    return state.x.back() - state.virtual_left();
}

double lambda_interpolant_sup_gap(const MultiplierVector& mult) {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < mult.lambda.size(); ++i)
        m = std::max(m, std::abs(mult.lambda[i + 1] - mult.lambda[i]));
    return m;
}

double slackness_pairing(const ParticleConfig& state, const MultiplierVector& mult) {
    const int n = state.n();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double mean_lambda =
            0.5 * (mult.lambda[static_cast<std::size_t>(i)] + mult.lambda[static_cast<std::size_t>(i) + 1]);
        total += mean_lambda * (1.0 - omega(state, i)) / n;
    }
    return total;
}

double lambda_interpolant_gap_L2t(const Trajectory& traj) {
    double acc = 0.0;
    for (const MultiplierVector& m : traj.multipliers) {
        const double s = lambda_interpolant_sup_gap(m);
        acc += traj.tau * s * s;
    }
    return std::sqrt(acc);
}

double slackness_integral(const Trajectory& traj) {
    double acc = 0.0;
    for (std::size_t k = 0; k < traj.multipliers.size(); ++k)
        acc += traj.tau * slackness_pairing(traj.states[k + 1], traj.multipliers[k]);
    return std::abs(acc);
}

double max_step_displacement(const Trajectory& traj) {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < traj.states[k].x.size(); ++i) {
            const double d = traj.states[k + 1].x[i] - traj.states[k].x[i];
            d2 += d * d;
        }
        worst = std::max(worst, std::sqrt(d2));
    }
    return worst;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << "k,t,i,x,lambda\n";
    const int n = traj.n();
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const double t = static_cast<double>(k) * traj.tau;
        for (int i = 1; i <= n; ++i) {
            const double lam =
                k == 0 ? 0.0 : traj.multipliers[k - 1].lambda[static_cast<std::size_t>(i)];
            out << k << ',' << t << ',' << i << ',' << traj.states[k].x[static_cast<std::size_t>(i) - 1]
                << ',' << lam << '\n';
        }
    }
}

std::string trajectory_metadata_json(const Trajectory& traj) {
    nlohmann::json j;
    j["n"] = traj.n();
    j["tau"] = traj.tau;
    j["steps"] = traj.steps();
    j["T"] = traj.duration();
    j["phi_bar"] = traj.phi_bar;
    j["potential"] = {{"name", traj.potential.name}, {"c0", traj.potential.c0}, {"c2", traj.potential.c2}};
    j["interaction"] = traj.interaction ? traj.interaction->name : "none";
    j["completed"] = traj.completed;
    if (!traj.completed) {
        j["failed_step"] = traj.failed_step;
        j["failure"] = traj.failure;
    }
    double max_kkt = 0.0, max_slack = 0.0, max_consistency = 0.0, min_lambda = 0.0;
    for (const StepReport& r : traj.reports) {
        max_kkt = std::max(max_kkt, r.kkt_residual);
        max_slack = std::max(max_slack, r.slackness_residual);
        max_consistency = std::max(max_consistency, r.multiplier_residual);
    }
    for (const MultiplierVector& m : traj.multipliers) min_lambda = std::min(min_lambda, m.min_value());
    j["residuals"] = {{"max_kkt", max_kkt},
                      {"max_slackness", max_slack},
                      {"max_multiplier_consistency", max_consistency},
                      {"min_lambda", min_lambda}};
    if (!traj.reports.empty()) {
        j["energy_initial"] = traj.reports.front().energy_before;
        j["energy_final"] = traj.reports.back().energy_after;
    }
    return j.dump(2);
}

}  // namespace congest1d
