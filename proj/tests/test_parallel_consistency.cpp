// The OpenMP kernels must reproduce the serial reference bit-for-bit: all
// parallel loops write disjoint slots and reductions happen in index order.

#include "aot/adapted.hpp"
#include "aot/harness.hpp"
#include "aot/moduli.hpp"
#include "aot/rng.hpp"
#include "aot/smoothing.hpp"

#include <doctest.h>

using namespace aot;

TEST_CASE("adapted distance: serial vs parallel") {
    std::mt19937_64 rng(211);
    for (int trial = 0; trial < 4; ++trial) {
        PathMeasure a = harness::random_measure(rng, 1, 2 + trial % 2, 6);
        PathMeasure b = harness::random_measure(rng, 1, 2 + trial % 2, 6);
        double p = 1.0 + trial % 2;
        CHECK(aw_value(a, b, p, Execution::serial) == aw_value(a, b, p, Execution::parallel));
        CHECK(av(a, b, Execution::serial) == av(a, b, Execution::parallel));
    }
}

TEST_CASE("smoothed adapted distance: serial vs parallel") {
    PathMeasure mu = harness::standard_mu();
    PathMeasure mu_eps = harness::standard_mu_eps(0.3);
    NoiseModel noise = NoiseModel::gaussian(2);
    SmoothScheme scheme;
    scheme.grid_step = 0.0625;
    scheme.radius_mult = 4.0;
    auto s = smooth_aw(mu, mu_eps, noise, 1.0, 0.5, scheme, Execution::serial);
    auto p = smooth_aw(mu, mu_eps, noise, 1.0, 0.5, scheme, Execution::parallel);
    CHECK(s.value == p.value);
    CHECK(s.budget == p.budget);
}

TEST_CASE("modulus machinery: serial vs parallel") {
    std::mt19937_64 rng(223);
    for (int trial = 0; trial < 4; ++trial) {
        PathMeasure m = harness::random_measure(rng, 1, 3, 6);
        CHECK(modulus_omega(m, 1, 1.0, 0.5, Execution::serial) ==
              modulus_omega(m, 1, 1.0, 0.5, Execution::parallel));
        CHECK(extended_modulus_omega_bar(m, 1, 2.0, 0.5, Execution::serial) ==
              extended_modulus_omega_bar(m, 1, 2.0, 0.5, Execution::parallel));
        CHECK(holder_constant(m, 1.0, 1.0, Execution::serial) ==
              holder_constant(m, 1.0, 1.0, Execution::parallel));
    }
}

TEST_CASE("harness suite: serial vs parallel") {
    auto s = harness::run_suite("core", 3, Execution::serial);
    auto p = harness::run_suite("core", 3, Execution::parallel);
    REQUIRE(s.reports.size() == p.reports.size());
    for (std::size_t i = 0; i < s.reports.size(); ++i) {
        CHECK(s.reports[i].lhs == p.reports[i].lhs);
        CHECK(s.reports[i].rhs == p.reports[i].rhs);
        CHECK(s.reports[i].bound_id == p.reports[i].bound_id);
    }
}
