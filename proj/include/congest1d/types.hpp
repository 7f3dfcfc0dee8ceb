#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace congest1d {

// Ordered particle positions with hard minimum spacing 1/N (particle
// diameter 2r = 1/N). Admissibility: x[i+1] - x[i] >= 1/N for all i.
struct ParticleConfig {
    std::vector<double> x;

    int n() const { return static_cast<int>(x.size()); }
    double min_gap() const { return 1.0 / static_cast<double>(x.size()); }

    // Virtual left neighbor x_0 := x_1 - 2/N used by the histogram and
    // pressure reconstructions.
    double virtual_left() const { return x.front() - 2.0 / static_cast<double>(x.size()); }

    bool in_cone(double tol = 1e-12) const {
        const double g = min_gap();
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            if (x[i + 1] - x[i] < g - tol) return false;
        return true;
    }
};

// Discrete pressures lambda_0..lambda_N; the boundary entries are pinned
// to zero (no pressure on the outermost particles).
struct MultiplierVector {
    std::vector<double> lambda;  // size N+1

    int n() const { return static_cast<int>(lambda.size()) - 1; }
    double min_value() const {
        double m = 0.0;
        for (double v : lambda) m = v < m ? v : m;
        return m;
    }
    static MultiplierVector zeros(int n) {
        MultiplierVector m;
        m.lambda.assign(static_cast<std::size_t>(n) + 1, 0.0);
        return m;
    }
};

}  // namespace congest1d
