#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "congest1d/harness.hpp"
#include "congest1d/metrics.hpp"
#include "congest1d/sampling.hpp"

using namespace congest1d;

TEST_SUITE("sampling") {

TEST_CASE("density validation") {
    CHECK_THROWS_AS(make_density({0.0, 1.0}, {0.5}), std::invalid_argument);   // mass 1/2
    CHECK_THROWS_AS(make_density({0.0, 0.5}, {2.0}), std::invalid_argument);   // above 1
    CHECK_THROWS_AS(make_density({1.0, 0.0}, {1.0}), std::invalid_argument);   // unsorted
    CHECK_THROWS_AS(uniform_density(0.0, 0.5), std::invalid_argument);         // height 2
    const MacroDensity d = make_density({0.0, 0.5, 1.0, 1.5}, {1.0, 0.0, 1.0});
    CHECK(d.mass() == doctest::Approx(1.0));
    CHECK(d.xi_left() == doctest::Approx(0.0));
    CHECK(d.xi_right() == doctest::Approx(1.5));
}

TEST_CASE("quantile of the uniform density is the identity") {
    const QuantileFn q = quantile_of_density(uniform_density(0.0, 1.0));
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) CHECK(q(s) == doctest::Approx(s));
    CHECK(q.monotone());
}

TEST_CASE("quantile of the half-density doubles") {
    const QuantileFn q = quantile_of_density(make_density({0.0, 2.0}, {0.5}));
    for (double s : {0.1, 0.5, 1.0}) CHECK(q(s) == doctest::Approx(2.0 * s));
}

TEST_CASE("quantile jumps across a zero-density gap") {
    const QuantileFn q = quantile_of_density(make_density({0.0, 0.5, 1.0, 1.5}, {1.0, 0.0, 1.0}));
    CHECK(q(0.5) == doctest::Approx(0.5));              // infimum convention at the jump level
    CHECK(q(0.5 + 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(q(0.75) == doctest::Approx(1.25));
    CHECK(q(0.0) == doctest::Approx(0.0));
    CHECK(q(1.0) == doctest::Approx(1.5));
}

TEST_CASE("zero-mass input is rejected") {
    MacroDensity broken;
    broken.breakpoints = {0.0, 1.0};
    broken.values = {0.0};
    CHECK_THROWS_AS(quantile_of_density(broken), std::invalid_argument);
}

TEST_CASE("sampling the uniform density") {
    const QuantileFn q = quantile_of_density(uniform_density(0.0, 1.0));
    const ParticleConfig X = sample_particles(q, 4);
    REQUIRE(X.n() == 4);
    CHECK(X.x[0] == doctest::Approx(0.25));
    CHECK(X.x[1] == doctest::Approx(0.5));
    CHECK(X.x[2] == doctest::Approx(0.75));
    CHECK(X.x[3] == doctest::Approx(1.0));
    CHECK(X.in_cone());
    CHECK_THROWS_AS(sample_particles(q, 1), std::invalid_argument);
}

TEST_CASE("sampling the half-density") {
    const QuantileFn q = quantile_of_density(make_density({0.0, 2.0}, {0.5}));
    const ParticleConfig X = sample_particles(q, 2);
    CHECK(X.x[0] == doctest::Approx(1.0));
    CHECK(X.x[1] == doctest::Approx(2.0));
}

TEST_CASE("L1 sampling error, uniform density, N = 4") {
    const QuantileFn q = quantile_of_density(uniform_density(0.0, 1.0));
    const ParticleConfig X = sample_particles(q, 4);
    // integral of the sawtooth: 4 * (1/32)
    CHECK(sampling_error_bound_check(q, X) == doctest::Approx(0.125));
    CHECK(sampling_error_bound_check(q, X) <= 0.25 + 1e-12);
}

TEST_CASE("L1 sampling error, two blocks, N = 2") {
    const QuantileFn q = quantile_of_density(make_density({0.0, 0.5, 1.0, 1.5}, {1.0, 0.0, 1.0}));
    const ParticleConfig X = sample_particles(q, 2);
    CHECK(X.x[0] == doctest::Approx(0.5));
    CHECK(X.x[1] == doctest::Approx(1.5));
    CHECK(sampling_error_bound_check(q, X) == doctest::Approx(0.25));
    CHECK(sampling_error_bound_check(q, X) <= 1.5 / 2 + 1e-12);
}

TEST_CASE("resampling a step quantile at its own knots is exact") {
    ParticleConfig base{{-0.3, 0.4, 1.1, 1.9}};
    const QuantileFn q = empirical_quantile(base);
    const ParticleConfig X = sample_particles(q, 4);
    CHECK(X.x == base.x);
    CHECK(sampling_error_bound_check(q, X) == doctest::Approx(0.0));
}

TEST_CASE("corpus bound: error <= span / N") {
    std::mt19937_64 rng(321);
    std::vector<MacroDensity> corpus{uniform_density(0.0, 1.0), uniform_density(-2.0, 2.0),
                                     make_density({0.0, 2.0}, {0.5}),
                                     make_density({0.0, 0.5, 1.0, 1.5}, {1.0, 0.0, 1.0})};
    for (int k = 0; k < 5; ++k) corpus.push_back(random_block_density(rng));
    for (const MacroDensity& rho : corpus) {
        const QuantileFn q = quantile_of_density(rho);
        const double span = rho.xi_right() - rho.xi_left();
        for (int n : {4, 16, 64, 256}) {
            const ParticleConfig X = sample_particles(q, n);
            CHECK(X.in_cone());
            CHECK(sampling_error_bound_check(q, X) <= span / n + 1e-12);
        }
        // density quantiles climb at least at unit speed
        for (double s : q.slope) CHECK(s >= 1.0 - 1e-12);
    }
}

}  // TEST_SUITE
