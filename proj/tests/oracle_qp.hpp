#pragma once

// Brute-force references for small instances, independent of the production
// solver path: enumerate every active set, solve the equality-constrained
// problem by damped Newton over block positions, and keep the candidate whose
// multipliers and slacks are admissible.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "congest1d/jko.hpp"
#include "congest1d/potential.hpp"
#include "congest1d/types.hpp"

namespace congest1d::testing {

struct OracleResult {
    std::vector<double> x;
    std::vector<double> lambda;  // size N+1, boundary zeros
    bool found = false;
};

namespace detail {

inline std::vector<int> block_starts(unsigned mask, int n) {
    std::vector<int> starts{0};
    for (int i = 0; i + 1 < n; ++i)
        if (!(mask & (1u << i))) starts.push_back(i + 1);
    starts.push_back(n);
    return starts;
}

inline void positions_from(const std::vector<int>& starts, const std::vector<double>& z, int n,
                           double gap, std::vector<double>& x) {
    x.resize(static_cast<std::size_t>(n));
    for (std::size_t b = 0; b + 1 < starts.size(); ++b)
        for (int i = starts[b]; i < starts[b + 1]; ++i)
            x[static_cast<std::size_t>(i)] = z[b] + (i - starts[b]) * gap;
}

// dense symmetric solve, pivot-free (matrices here are strictly diagonally
// dominant for admissible step sizes)
inline bool solve_dense(std::vector<std::vector<double>> A, std::vector<double>& b) {
    const std::size_t m = b.size();
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < m; ++r)
            if (std::abs(A[r][k]) > std::abs(A[piv][k])) piv = r;
        std::swap(A[k], A[piv]);
        std::swap(b[k], b[piv]);
        if (std::abs(A[k][k]) < 1e-300) return false;
        for (std::size_t r = k + 1; r < m; ++r) {
            const double f = A[r][k] / A[k][k];
            for (std::size_t c = k; c < m; ++c) A[r][c] -= f * A[k][c];
            b[r] -= f * b[k];
        }
    }
    for (std::size_t k = m; k-- > 0;) {
        for (std::size_t c = k + 1; c < m; ++c) b[k] -= A[k][c] * b[c];
        b[k] /= A[k][k];
    }
    return true;
}

}  // namespace detail

// argmin over the cone of  (1/N) sum phi(x_i) + |X - Xk|^2/(2 N tau)
// [+ (1/(2N^2)) sum W(x_i - x_j)]
inline OracleResult brute_force_step(const ParticleConfig& Xk, const Potential& p,
                                     const InteractionKernel* w, double tau) {
    const int n = Xk.n();
    if (n > 12) throw std::invalid_argument("brute_force_step: instance too large");
    const double gap = 1.0 / n;

    auto drift = [&](const std::vector<double>& x, int i) {
        double d = p.grad(x[static_cast<std::size_t>(i)]);
        if (w) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += w->grad(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
            d += s / n;
        }
        return d;
    };
    auto grad_full = [&](const std::vector<double>& x, std::vector<double>& g) {
        g.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            g[static_cast<std::size_t>(i)] =
                (drift(x, i) + (x[static_cast<std::size_t>(i)] - Xk.x[static_cast<std::size_t>(i)]) / tau) / n;
    };
    auto value = [&](const std::vector<double>& x) {
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            e += p.value(x[static_cast<std::size_t>(i)]) / n;
            const double d = x[static_cast<std::size_t>(i)] - Xk.x[static_cast<std::size_t>(i)];
            e += d * d / (2.0 * n * tau);
        }
        if (w)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    e += w->value(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]) /
                         (2.0 * static_cast<double>(n) * n);
        return e;
    };
    // second derivative of the interaction by central differences; the
    // reference path is allowed to differentiate numerically
    auto w2 = [&](double z) {
        if (!w) return 0.0;
        const double h = 1e-6;
        return (w->grad(z + h) - w->grad(z - h)) / (2.0 * h);
    };

    OracleResult best;
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<double> x, g, z, G;

    for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
        const std::vector<int> starts = detail::block_starts(mask, n);
        const std::size_t B = starts.size() - 1;
        z.resize(B);
        for (std::size_t b = 0; b < B; ++b) z[b] = Xk.x[static_cast<std::size_t>(starts[b])];

        bool solved = false;
        for (int it = 0; it < 400; ++it) {
            detail::positions_from(starts, z, n, gap, x);
            grad_full(x, g);
            G.assign(B, 0.0);
            for (std::size_t b = 0; b < B; ++b)
                for (int i = starts[b]; i < starts[b + 1]; ++i) G[b] += g[static_cast<std::size_t>(i)];
            double gn = 0.0;
            for (double v : G) gn = std::max(gn, std::abs(v));
            if (gn <= 1e-14 * n) {
                solved = true;
                break;
            }
            // reduced Hessian
            std::vector<std::vector<double>> H(B, std::vector<double>(B, 0.0));
            for (std::size_t b = 0; b < B; ++b)
                for (int i = starts[b]; i < starts[b + 1]; ++i) {
                    H[b][b] += (p.hess(x[static_cast<std::size_t>(i)]) + 1.0 / tau) / n;
                    if (w)
                        for (std::size_t c = 0; c < B; ++c)
                            for (int j = starts[c]; j < starts[c + 1]; ++j) {
                                const double wij =
                                    w2(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]) /
                                    (static_cast<double>(n) * n);
                                H[b][b] += wij;
                                H[b][c] -= wij;
                            }
                }
            std::vector<double> d = G;
            for (double& v : d) v = -v;
            if (!detail::solve_dense(H, d)) break;
            const double f0 = value(x);
            double gd = 0.0;
            for (std::size_t b = 0; b < B; ++b) gd += G[b] * d[b];
            double t = 1.0;
            std::vector<double> zt(B);
            for (int ls = 0; ls < 60; ++ls) {
                for (std::size_t b = 0; b < B; ++b) zt[b] = z[b] + t * d[b];
                detail::positions_from(starts, zt, n, gap, x);
                if (value(x) <= f0 + 1e-4 * t * gd + 1e-15) break;
                t *= 0.5;
            }
            z = zt;
        }
        if (!solved) continue;

        detail::positions_from(starts, z, n, gap, x);
        // inactive gaps must stay admissible
        bool feasible = true;
        for (int i = 0; i + 1 < n; ++i)
            if (!(mask & (1u << i)))
                if (x[static_cast<std::size_t>(i) + 1] - x[static_cast<std::size_t>(i)] < gap - 1e-10)
                    feasible = false;
        if (!feasible) continue;

        grad_full(x, g);
        std::vector<double> lambda(static_cast<std::size_t>(n) + 1, 0.0);
        bool dual_ok = true;
        for (int i = 0; i < n; ++i) {
            lambda[static_cast<std::size_t>(i) + 1] = lambda[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)];
            if (i + 1 <= n - 1 && lambda[static_cast<std::size_t>(i) + 1] < -1e-10) dual_ok = false;
        }
        if (std::abs(lambda.back()) > 1e-10) continue;  // not block-stationary
        if (!dual_ok) continue;
        lambda.back() = 0.0;

        const double v = value(x);
        if (v < best_value) {
            best_value = v;
            best.x = x;
            best.lambda = lambda;
            best.found = true;
        }
    }
    return best;
}

// argmin ||Z - Y||^2 subject to z_{i+1} - z_i >= 1/n, by the same enumeration
inline std::vector<double> brute_force_projection(const std::vector<double>& y) {
    const int n = static_cast<int>(y.size());
    if (n > 12) throw std::invalid_argument("brute_force_projection: instance too large");
    const double gap = 1.0 / n;

    std::vector<double> best;
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<double> x, z;
    for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
        const std::vector<int> starts = detail::block_starts(mask, n);
        const std::size_t B = starts.size() - 1;
        z.resize(B);
        for (std::size_t b = 0; b < B; ++b) {
            double acc = 0.0;
            for (int i = starts[b]; i < starts[b + 1]; ++i)
                acc += y[static_cast<std::size_t>(i)] - (i - starts[b]) * gap;
            z[b] = acc / (starts[b + 1] - starts[b]);
        }
        detail::positions_from(starts, z, n, gap, x);

        bool feasible = true;
        for (int i = 0; i + 1 < n; ++i)
            if (!(mask & (1u << i)))
                if (x[static_cast<std::size_t>(i) + 1] - x[static_cast<std::size_t>(i)] < gap - 1e-12)
                    feasible = false;
        if (!feasible) continue;

        double mu = 0.0;
        bool dual_ok = true;
        for (int i = 0; i + 1 < n; ++i) {
            mu -= x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
            if ((mask & (1u << i)) && mu < -1e-12) dual_ok = false;
            if (!(mask & (1u << i)) && std::abs(mu) > 1e-12) dual_ok = false;
        }
        if (!dual_ok) continue;

        double v = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
            v += d * d;
        }
        if (v < best_value) {
            best_value = v;
            best = x;
        }
    }
    return best;
}

}  // namespace congest1d::testing
