// Compares the serial reference implementations against the OpenMP kernels
// on growing synthetic instances. Prints CSV; values must agree bit-for-bit.

#include "aot/adapted.hpp"
#include "aot/harness.hpp"
#include "aot/moduli.hpp"
#include "aot/parallel.hpp"
#include "aot/path_measure.hpp"
#include "aot/rng.hpp"
#include "aot/smoothing.hpp"

#include <chrono>
#include <cstdio>
#include <random>

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

aot::PathMeasure dense_instance(std::uint64_t seed, int atoms) {
    std::mt19937_64 rng(seed);
    auto weights = aot::dirichlet_weights(rng, atoms);
    std::vector<aot::Atom> out;
    for (int i = 0; i < atoms; ++i)
        out.push_back({{aot::uniform(rng, -2, 2), aot::uniform(rng, -2, 2)}, weights[i]});
    return aot::PathMeasure(1, 2, std::move(out));
}

} // namespace

int main() {
    std::printf("kernel,size,serial_ms,parallel_ms,speedup,match\n");

    // smoothed DPP: stage subproblems parallelize over prefix pairs
    for (int atoms : {4, 8, 16}) {
        aot::PathMeasure mu = dense_instance(91 + atoms, atoms);
        aot::PathMeasure nu = dense_instance(17 + atoms, atoms);
        aot::NoiseModel noise = aot::NoiseModel::gaussian(2);
        aot::SmoothScheme scheme;
        scheme.grid_step = 0.125;
        scheme.radius_mult = 3.0;
        scheme.snap_pow2 = true;
        aot::SmoothedApprox a = aot::convolve_quantized(mu, noise, 0.5, 1.0, scheme);
        aot::SmoothedApprox b = aot::convolve_quantized(nu, noise, 0.5, 1.0, scheme);

        auto t0 = Clock::now();
        double vs = aot::aw_value(a.approx, b.approx, 1.0, aot::Execution::serial);
        double serial = ms_since(t0);
        t0 = Clock::now();
        double vp = aot::aw_value(a.approx, b.approx, 1.0, aot::Execution::parallel);
        double par = ms_since(t0);
        std::printf("aw_dpp,%zux%zu,%.2f,%.2f,%.2f,%s\n", a.approx.size(), b.approx.size(),
                    serial, par, serial / par, vs == vp ? "yes" : "NO");
    }

    // modulus gain matrix: kernel distances parallelize over prefix pairs
    for (int atoms : {8, 16, 32}) {
        std::mt19937_64 rng(1234 + atoms);
        aot::PathMeasure mu = aot::harness::random_measure(rng, 1, 3, atoms);
        auto t0 = Clock::now();
        double vs = aot::modulus_omega(mu, 2, 1.0, 0.5, aot::Execution::serial);
        double serial = ms_since(t0);
        t0 = Clock::now();
        double vp = aot::modulus_omega(mu, 2, 1.0, 0.5, aot::Execution::parallel);
        double par = ms_since(t0);
        std::printf("modulus_gain,%d,%.2f,%.2f,%.2f,%s\n", atoms, serial, par, serial / par,
                    vs == vp ? "yes" : "NO");
    }

    // harness suite loop: instances parallelize
    {
        auto t0 = Clock::now();
        auto rs = aot::harness::run_suite("core", 7, aot::Execution::serial);
        double serial = ms_since(t0);
        t0 = Clock::now();
        auto rp = aot::harness::run_suite("core", 7, aot::Execution::parallel);
        double par = ms_since(t0);
        bool same = rs.reports.size() == rp.reports.size();
        for (std::size_t i = 0; same && i < rs.reports.size(); ++i)
            same = rs.reports[i].lhs == rp.reports[i].lhs && rs.reports[i].rhs == rp.reports[i].rhs;
        std::printf("core_suite,%zu,%.2f,%.2f,%.2f,%s\n", rs.reports.size(), serial, par,
                    serial / par, same ? "yes" : "NO");
    }
    return 0;
}
