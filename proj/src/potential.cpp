#include "congest1d/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace congest1d {

PotentialGridCheck validate_potential(const Potential& p, double lo, double hi, int points) {
    if (points < 3) throw std::invalid_argument("validate_potential: need at least 3 grid points");
    PotentialGridCheck r;
    const double h = (hi - lo) / (points - 1);
    for (int k = 0; k < points; ++k) {
        const double x = lo + k * h;
        if (p.strict) {
            const double gap = p.c0 * (1.0 + x * x) - p.value(x);
            r.max_lower_bound_violation = std::max(r.max_lower_bound_violation, gap);
        }
        r.max_hess_excess = std::max(r.max_hess_excess, std::abs(p.hess(x)) - p.c2);
        if (k > 0 && k + 1 < points) {
            const double fd = (p.value(x + h) - p.value(x - h)) / (2.0 * h);
            const double scale = std::max(1.0, std::abs(p.grad(x)));
            // central difference carries an O(h^2 * c2') truncation term
            const double err = std::abs(fd - p.grad(x)) / scale;
            r.max_grad_fd_error = std::max(r.max_grad_fd_error, err);
        }
    }
    const double fd_tol = std::max(1e-6, h * h * std::max(1.0, p.c2));
    r.pass = r.max_lower_bound_violation <= 1e-9 && r.max_hess_excess <= 1e-9 &&
             r.max_grad_fd_error <= fd_tol;
    return r;
}

KernelGridCheck validate_kernel(const InteractionKernel& w, double lo, double hi, int points) {
    KernelGridCheck r;
    const double h = (hi - lo) / (points - 1);
    for (int k = 0; k < points; ++k) {
        const double z = lo + k * h;
        r.max_symmetry_violation = std::max(r.max_symmetry_violation, std::abs(w.value(z) - w.value(-z)));
        r.max_odd_violation = std::max(r.max_odd_violation, std::abs(w.grad(z) + w.grad(-z)));
    }
    r.pass = r.max_symmetry_violation <= 1e-12 && r.max_odd_violation <= 1e-12;
    return r;
}

Potential quadratic_potential(double center, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("quadratic_potential: scale must be positive");
    Potential p;
    p.value = [center, scale](double x) { return scale * (1.0 + (x - center) * (x - center)); };
    p.grad = [center, scale](double x) { return 2.0 * scale * (x - center); };
    p.hess = [scale](double) { return 2.0 * scale; };
    // largest c with (1+(x-center)^2) >= c(1+x^2): smallest eigenvalue of
    // [[1,-center],[-center,1+center^2]] (det 1, trace 2+center^2)
    const double tr = 2.0 + center * center;
    p.c0 = scale * 0.5 * (tr - std::sqrt(tr * tr - 4.0));
    p.c2 = 2.0 * scale;
    p.name = "quadratic";
    p.validation = validate_potential(p);
    return p;
}

Potential double_well_potential(double amplitude, double width) {
    if (!(amplitude > 0.0) || !(width > 0.0))
        throw std::invalid_argument("double_well_potential: amplitude and width must be positive");
    const double w2 = width * width;
    Potential p;
    p.value = [amplitude, w2](double x) { return x * x + amplitude * std::exp(-x * x / w2); };
    p.grad = [amplitude, w2](double x) {
        return 2.0 * x - amplitude * (2.0 * x / w2) * std::exp(-x * x / w2);
    };
    p.hess = [amplitude, w2](double x) {
        const double e = std::exp(-x * x / w2);
        return 2.0 + amplitude * e * (4.0 * x * x / (w2 * w2) - 2.0 / w2);
    };
    p.c2 = 2.0 + 2.0 * amplitude / w2;  // |phi''| <= 2 + 2A/w^2 since |e^{-v}(4v-2)| <= 2
    // scan the confinement ratio; beyond the scan range the bump is negligible
    // and phi/(1+x^2) -> 1
    double c0 = 1.0;
    const int m = 6001;
    const double lo = -15.0 * width, hi = 15.0 * width;
    for (int k = 0; k < m; ++k) {
        const double x = lo + (hi - lo) * k / (m - 1);
        c0 = std::min(c0, p.value(x) / (1.0 + x * x));
    }
    p.c0 = c0 * (1.0 - 1e-9);
    p.name = "double_well_confined";
    p.validation = validate_potential(p);
    return p;
}

Potential table_potential(std::vector<double> xs, std::vector<double> values,
                          std::vector<double> grads, std::vector<double> hessians, bool strict) {
    const std::size_t m = xs.size();
    if (m < 2 || values.size() != m || grads.size() != m || hessians.size() != m)
        throw std::invalid_argument("table_potential: inconsistent table sizes");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw std::invalid_argument("table_potential: abscissae must be sorted");

    auto locate = [xs](double x) -> std::size_t {
        if (x < xs.front() || x > xs.back())
            throw std::invalid_argument("table_potential: evaluation outside table range");
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t j = static_cast<std::size_t>(it - xs.begin());
        if (j > 0) --j;
        if (j + 1 >= xs.size()) j = xs.size() - 2;
        return j;
    };
    auto lerp = [xs, locate](const std::vector<double>& ys, double x) {
        const std::size_t j = locate(x);
        const double t = (x - xs[j]) / (xs[j + 1] - xs[j]);
        return (1.0 - t) * ys[j] + t * ys[j + 1];
    };

    Potential p;
    p.value = [lerp, values](double x) { return lerp(values, x); };
    p.grad = [lerp, grads](double x) { return lerp(grads, x); };
    p.hess = [locate, hessians](double x) { return hessians[locate(x)]; };
    p.strict = strict;
    double c2 = 0.0;
    for (double h : hessians) c2 = std::max(c2, std::abs(h));
    p.c2 = c2;
    double c0 = values[0] / (1.0 + xs[0] * xs[0]);
    for (std::size_t j = 0; j < m; ++j) c0 = std::min(c0, values[j] / (1.0 + xs[j] * xs[j]));
    p.c0 = c0 * (1.0 - 1e-9);
    if (strict && !(p.c0 > 0.0))
        throw std::invalid_argument("table_potential: confinement constant is not positive");
    p.name = "custom-table";
    // check the triple on its own nodes; an off-grid central difference would
    // only measure the interpolation kinks
    PotentialGridCheck chk;
    for (std::size_t j = 0; j < m; ++j) {
        if (strict)
            chk.max_lower_bound_violation = std::max(
                chk.max_lower_bound_violation, p.c0 * (1.0 + xs[j] * xs[j]) - values[j]);
        chk.max_hess_excess = std::max(chk.max_hess_excess, std::abs(hessians[j]) - p.c2);
        if (j > 0 && j + 1 < m) {
            const double fd = (values[j + 1] - values[j - 1]) / (xs[j + 1] - xs[j - 1]);
            // the secant equals phi' somewhere in the window, so allow c2 * h
            const double h = 0.5 * (xs[j + 1] - xs[j - 1]);
            const double tol_scale = std::max(1.0, std::abs(grads[j]));
            chk.max_grad_fd_error =
                std::max(chk.max_grad_fd_error, (std::abs(fd - grads[j]) - h * p.c2) / tol_scale);
        }
    }
    chk.max_grad_fd_error = std::max(chk.max_grad_fd_error, 0.0);
    chk.pass = chk.max_lower_bound_violation <= 1e-9 && chk.max_hess_excess <= 1e-9 &&
               chk.max_grad_fd_error <= 1e-6;
    p.validation = chk;
    return p;
}

InteractionKernel quadratic_kernel() {
    InteractionKernel w;
    w.value = [](double z) { return 0.5 * z * z; };
    w.grad = [](double z) { return z; };
    w.curvature_bound = 1.0;
    w.name = "quadratic";
    return w;
}

InteractionKernel gaussian_bump_kernel(double amplitude, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump_kernel: width must be positive");
    const double w2 = width * width;
    InteractionKernel w;
    w.value = [amplitude, w2](double z) { return amplitude * std::exp(-z * z / w2); };
    w.grad = [amplitude, w2](double z) {
        return -amplitude * (2.0 * z / w2) * std::exp(-z * z / w2);
    };
    w.curvature_bound = 2.0 * std::abs(amplitude) / w2;
    w.name = "gaussian-bump";
    return w;
}

double total_drift(const Potential& p, const InteractionKernel* w, const ParticleConfig& config,
                   int i) {
    const int n = config.n();
    if (i < 0 || i >= n) throw std::invalid_argument("total_drift: particle index out of range");
    double d = -p.grad(config.x[static_cast<std::size_t>(i)]);
    if (w) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            s += w->grad(config.x[static_cast<std::size_t>(i)] - config.x[static_cast<std::size_t>(j)]);
        d -= s / static_cast<double>(n);
    }
    return d;
}

}  // namespace congest1d
