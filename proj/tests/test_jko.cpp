#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "congest1d/jko.hpp"
#include "congest1d/potential.hpp"
#include "oracle_qp.hpp"

using namespace congest1d;

namespace {

Potential flat_potential() {
    Potential p;
    p.value = [](double) { return 1.0; };
    p.grad = [](double) { return 0.0; };
    p.hess = [](double) { return 0.0; };
    p.c0 = 0.0;
    p.c2 = 0.0;
    p.strict = false;
    p.name = "flat";
    return p;
}

ParticleConfig random_admissible(int n, std::mt19937_64& rng, double spread = 0.3) {
    std::uniform_real_distribution<double> u(0.0, spread);
    ParticleConfig X;
    double pos = -0.5 * n * (1.0 / n + 0.5 * spread);
    for (int i = 0; i < n; ++i) {
        pos += 1.0 / n + u(rng);
        X.x.push_back(pos);
    }
    return X;
}

}  // namespace

TEST_SUITE("jko") {

TEST_CASE("projection leaves admissible points alone") {
    const std::vector<double> y{0.0, 0.7, 1.6};
    CHECK(project_to_cone(y) == y);
}

TEST_CASE("projection pools a violating pair") {
    const std::vector<double> z = project_to_cone({0.3, 0.2});
    CHECK(z[0] == doctest::Approx(0.0));
    CHECK(z[1] == doctest::Approx(0.5));
}

TEST_CASE("projection matches the enumeration oracle") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (double& v : y) v = u(rng);
        const std::vector<double> fast = project_to_cone(y);
        const std::vector<double> slow = testing::brute_force_projection(y);
        REQUIRE(slow.size() == fast.size());
        for (std::size_t i = 0; i < fast.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) <= 1e-10);
        const double g = 1.0 / n;
        for (std::size_t i = 0; i + 1 < fast.size(); ++i) CHECK(fast[i + 1] - fast[i] >= g - 1e-12);
    }
}

TEST_CASE("touching pair is a fixed point with pressure 1/4") {
    const Potential p = quadratic_potential(0.0, 1.0);
    const ParticleConfig Xk{{-0.25, 0.25}};
    const JkoResult r = jko_step(Xk, p, nullptr, 0.1);
    CHECK(r.config.x[0] == doctest::Approx(-0.25).epsilon(1e-10));
    CHECK(r.config.x[1] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(r.multipliers.lambda[0] == 0.0);
    CHECK(r.multipliers.lambda[1] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(r.multipliers.lambda[2] == 0.0);
    CHECK(r.report.multiplier_residual <= 1e-10);
    CHECK(r.report.slackness_residual <= 1e-10);
    CHECK(r.report.active_set == std::vector<int>{0});
}

TEST_CASE("far-apart pair takes the unconstrained proximal step") {
    const Potential p = quadratic_potential(0.0, 1.0);
    const JkoResult r = jko_step(ParticleConfig{{-2.0, 2.0}}, p, nullptr, 0.1);
    CHECK(r.config.x[0] == doctest::Approx(-5.0 / 3).epsilon(1e-10));
    CHECK(r.config.x[1] == doctest::Approx(5.0 / 3).epsilon(1e-10));
    CHECK(std::abs(r.multipliers.lambda[1]) <= 1e-10);
    CHECK(r.report.active_set.empty());
}

TEST_CASE("flat potential keeps any admissible state still") {
    const Potential p = flat_potential();
    const ParticleConfig Xk{{-1.0, 0.0, 2.0}};
    const JkoResult r = jko_step(Xk, p, nullptr, 0.3);
    for (int i = 0; i < 3; ++i)
        CHECK(r.config.x[static_cast<std::size_t>(i)] ==
              doctest::Approx(Xk.x[static_cast<std::size_t>(i)]).epsilon(1e-12));
    CHECK(r.multipliers.min_value() >= -1e-12);
    CHECK(r.report.movement <= 1e-20);
}

TEST_CASE("three touching particles at equilibrium") {
    const Potential p = quadratic_potential(0.0, 1.0);
    const ParticleConfig Xk{{-1.0 / 3, 0.0, 1.0 / 3}};
    const JkoResult r = jko_step(Xk, p, nullptr, 0.05);
    CHECK(r.config.x[0] == doctest::Approx(-1.0 / 3).epsilon(1e-10));
    CHECK(r.config.x[2] == doctest::Approx(1.0 / 3).epsilon(1e-10));
    CHECK(r.multipliers.lambda[1] == doctest::Approx(2.0 / 9).epsilon(1e-9));
    CHECK(r.multipliers.lambda[2] == doctest::Approx(2.0 / 9).epsilon(1e-9));
    CHECK(r.multipliers.lambda[3] == 0.0);
}

TEST_CASE("multiplier recovery flags nothing on a clean unconstrained step") {
    const Potential p = quadratic_potential(0.0, 1.0);
    const ParticleConfig Xk{{-2.0, 2.0}};
    const JkoResult r = jko_step(Xk, p, nullptr, 0.1);
    auto [mult, raw] = recover_multipliers(Xk, r.config, p, 0.1);
    CHECK(raw <= 1e-10);
    for (double lam : mult.lambda) CHECK(std::abs(lam) <= 1e-10);
}

TEST_CASE("slackness diagnostics") {
    ParticleConfig X{{0.0, 1.0}};  // gap 1, constraint at 1/2
    MultiplierVector L = MultiplierVector::zeros(2);
    CHECK(check_slackness(X, L) == doctest::Approx(0.0));
    L.lambda[1] = 0.25;
    CHECK(check_slackness(X, L) == doctest::Approx(0.25 * 0.5));
}

TEST_CASE("gaps within 1e-12 of 1/N count as contacts") {
    const Potential p = flat_potential();
    ParticleConfig X{{0.0, 0.5 + 5e-13}};
    const JkoResult r = jko_step(X, p, nullptr, 0.1);
    CHECK(r.report.active_set == std::vector<int>{0});
}

TEST_CASE("step-size guard") {
    const Potential p = quadratic_potential(0.0, 1.0);  // c2 = 2
    CHECK_THROWS_AS(jko_step(ParticleConfig{{-1.0, 1.0}}, p, nullptr, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(jko_step(ParticleConfig{{-1.0, 1.0}}, p, nullptr, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(jko_step(ParticleConfig{{1.0, 0.0}}, p, nullptr, 0.1), std::invalid_argument);
}

TEST_CASE("unreachable tolerance surfaces a convergence error with the best iterate") {
    const Potential p = quadratic_potential(0.0, 1.0);
    JkoOptions opt;
    opt.kkt_tol_per_particle = 0.0;
    opt.consistency_tol = 0.0;
    try {
        jko_step(ParticleConfig{{-1.0, 1.0}}, p, nullptr, 0.1, opt);
        FAIL("expected JkoConvergenceError");
    } catch (const JkoConvergenceError& e) {
        CHECK(e.best.n() == 2);
        CHECK(e.best.in_cone(1e-9));
    }
}

TEST_CASE("random steps match the enumeration oracle") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const Potential p = u01(rng) < 0.5
                                ? quadratic_potential(-1.0 + 2.0 * u01(rng), 0.5 + 1.5 * u01(rng))
                                : double_well_potential(2.0 + 2.0 * u01(rng), 1.0);
        std::optional<InteractionKernel> w;
        if (u01(rng) < 0.3) w = quadratic_kernel();
        const double c2e = p.c2 + (w ? 2.0 * w->curvature_bound : 0.0);
        const double tau = 0.5 / c2e * (0.2 + 0.8 * u01(rng));
        const ParticleConfig Xk = random_admissible(n, rng);

        const JkoResult fast = jko_step(Xk, p, w ? &*w : nullptr, tau);
        const testing::OracleResult slow = testing::brute_force_step(Xk, p, w ? &*w : nullptr, tau);
        REQUIRE(slow.found);
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(fast.config.x[static_cast<std::size_t>(i)] -
                           slow.x[static_cast<std::size_t>(i)]) <= 1e-8);
        for (int i = 0; i <= n; ++i)
            CHECK(std::abs(fast.multipliers.lambda[static_cast<std::size_t>(i)] -
                           slow.lambda[static_cast<std::size_t>(i)]) <= 1e-8);
        CHECK(fast.report.dissipative());
    }
}

TEST_CASE("energy balance holds on random chains of steps") {
    std::mt19937_64 rng(7);
    const Potential p = quadratic_potential(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        ParticleConfig X = random_admissible(12, rng, 0.2);
        for (int k = 0; k < 6; ++k) {
            const JkoResult r = jko_step(X, p, nullptr, 0.05);
            CHECK(r.report.dissipative());
            CHECK(r.report.energy_after <= r.report.energy_before + 1e-12);
            X = r.config;
        }
    }
}

}  // TEST_SUITE
