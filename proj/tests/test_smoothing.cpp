#include "aot/errors.hpp"
#include "aot/noise.hpp"
#include "aot/rng.hpp"
#include "aot/smoothing.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace aot;

namespace {

PathMeasure line_measure(std::vector<std::pair<double, double>> atom_weights) {
    std::vector<Atom> atoms;
    for (auto& [x, w] : atom_weights) atoms.push_back({{x}, w});
    return PathMeasure(1, 1, std::move(atoms));
}

PathMeasure random_measure(std::mt19937_64& rng, int d, int T, int max_atoms) {
    int k = 2 + static_cast<int>(uniform_index(rng, max_atoms - 1));
    auto w = dirichlet_weights(rng, k);
    std::vector<Atom> atoms;
    for (int i = 0; i < k; ++i) {
        Atom a;
        a.weight = w[i];
        a.path.resize(static_cast<std::size_t>(d) * T);
        for (auto& x : a.path) x = uniform(rng, -2, 2);
        atoms.push_back(std::move(a));
    }
    return PathMeasure(d, T, std::move(atoms));
}

} // namespace

TEST_CASE("gaussian gradient L1 norm") {
    // N = 1: integral of |x| phi(x)
    double numeric = oracles::simpson(
        [](double x) { return std::fabs(x) * 0.3989422804014327 * std::exp(-0.5 * x * x); },
        -10.0, 10.0, 4000);
    CHECK(gaussian_grad_l1(1) == doctest::Approx(numeric).epsilon(1e-10));
    CHECK(gaussian_grad_l1(1) == doctest::Approx(std::sqrt(2.0 / 3.141592653589793)));
    CHECK(gaussian_grad_l1(2) == doctest::Approx(std::sqrt(3.141592653589793 / 2.0)));

    // grows like sqrt(N)
    for (int n = 1; n <= 20; ++n) {
        double ratio = gaussian_grad_l1(n) / std::sqrt(static_cast<double>(n));
        CHECK(ratio > 0.70);
        CHECK(ratio <= 1.0);
    }
    CHECK(gaussian_grad_l1(20) / std::sqrt(20.0) > gaussian_grad_l1(5) / std::sqrt(5.0));

    // Monte Carlo cross-check of E|Z| within three standard errors
    std::mt19937_64 rng(2024);
    const int n_samples = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        double a = normal01(rng), b = normal01(rng);
        double r = std::hypot(a, b);
        sum += r;
        sum2 += r * r;
    }
    double mean = sum / n_samples;
    double se = std::sqrt((sum2 / n_samples - mean * mean) / n_samples);
    CHECK(std::fabs(gaussian_grad_l1(2) - mean) <= 3.0 * se);
}

TEST_CASE("noise model moments") {
    CHECK(NoiseModel::gaussian(3).moment_p(2.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(NoiseModel::gaussian(1).moment_p(1.0) ==
          doctest::Approx(std::sqrt(2.0 / 3.141592653589793)));
    // the bump lives in the unit ball and its second moment is exactly 1/7
    for (int n : {1, 2, 4}) {
        NoiseModel b = NoiseModel::uniform_ball(n);
        CHECK(b.moment_p(2.0) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
        CHECK(b.moment_p(1.0) <= 1.0);
        CHECK(b.support_radius() == 1.0);
        CHECK(b.coord_cdf(1.0) == doctest::Approx(1.0));
        CHECK(b.coord_cdf(-1.0) == doctest::Approx(0.0));
        CHECK(b.coord_cdf(0.0) == doctest::Approx(0.5));
    }
    // Monte Carlo: the reported bump values are upper bounds on E|Z|^p
    std::mt19937_64 rng(55);
    NoiseModel bump = NoiseModel::uniform_ball(2);
    auto draw_coord = [&]() {
        // inverse CDF by bisection
        double u = uniform01(rng), lo = -1.0, hi = 1.0;
        for (int it = 0; it < 50; ++it) {
            double mid = 0.5 * (lo + hi);
            (bump.coord_cdf(mid) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    double m1 = 0.0, m3 = 0.0;
    const int ns = 200000;
    for (int i = 0; i < ns; ++i) {
        double a = draw_coord(), b = draw_coord();
        double r = std::hypot(a, b);
        m1 += r;
        m3 += r * r * r;
    }
    m1 /= ns;
    m3 /= ns;
    CHECK(m1 <= bump.moment_p(1.0) + 3e-3);
    CHECK(m3 <= bump.moment_p(3.0) + 3e-3);

    // radial tails vanish for the gaussian as the radius grows, exactly for
    // the bump beyond its support
    NoiseModel g2 = NoiseModel::gaussian(2);
    CHECK(g2.radial_tail_moment(2.0, 0.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(g2.radial_tail_moment(2.0, 10.0) < 1e-15);
    CHECK(bump.radial_tail_moment(2.0, 1.0) == 0.0);
}

TEST_CASE("quantized convolution against the gaussian CDF") {
    PathMeasure delta0 = line_measure({{0.0, 1.0}});
    NoiseModel noise = NoiseModel::gaussian(1);
    const double sigma = 0.4;
    SmoothScheme scheme;
    scheme.grid_step = sigma / 20.0;
    scheme.radius_mult = 6.0;
    SmoothedApprox sm = convolve_quantized(delta0, noise, sigma, 1.0, scheme);

    double total = 0.0;
    for (const auto& a : sm.approx.atoms()) total += a.weight;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sm.trunc_mass > 0.0);
    CHECK(sm.trunc_mass < 1e-8);

    // cell-boundary CDF values match the exact smoothed CDF
    double cum = 0.0, worst = 0.0;
    for (const auto& a : sm.approx.atoms()) {
        double boundary = a.path[0] - 0.5 * sm.grid_step;
        worst = std::max(worst, std::fabs(cum - oracles::normal_cdf(boundary / sigma)));
        cum += a.weight;
    }
    CHECK(worst < 2e-3);
    CHECK(worst < 1e-7); // the cell masses are exact CDF differences
}

TEST_CASE("vanishing noise reduces to the original measure") {
    std::mt19937_64 rng(61);
    PathMeasure m = random_measure(rng, 1, 2, 4);
    SmoothedApprox sm = convolve_quantized(m, NoiseModel::gaussian(2), 1e-6, 1.0, {});
    CHECK(sm.budget_w() < 1e-4);
    CHECK(sm.budget_aw() < 1e-4);
    // every original atom keeps its weight within a tiny neighborhood
    for (std::size_t i = 0; i < m.size(); ++i) {
        double mass_near = 0.0;
        for (const auto& a : sm.approx.atoms()) {
            double d0 = a.path[0] - m.atom(i).path[0];
            double d1 = a.path[1] - m.atom(i).path[1];
            if (std::sqrt(d0 * d0 + d1 * d1) < 1e-4) mass_near += a.weight;
        }
        CHECK(mass_near == doctest::Approx(m.atom(i).weight).epsilon(1e-6));
    }
}

TEST_CASE("W1 budgets are sound on 1-D instances") {
    std::mt19937_64 rng(67);
    NoiseModel noise = NoiseModel::gaussian(1);
    for (int trial = 0; trial < 6; ++trial) {
        PathMeasure m = random_measure(rng, 1, 1, 4);
        double sigma = uniform(rng, 0.2, 0.8);
        SmoothScheme scheme;
        scheme.grid_step = sigma / (trial % 2 ? 8.0 : 20.0);
        scheme.radius_mult = 5.0;
        SmoothedApprox sm = convolve_quantized(m, noise, sigma, 1.0, scheme);

        oracles::Mixture exact;
        exact.sigma = sigma;
        for (const auto& a : m.atoms()) {
            exact.means.push_back(a.path[0]);
            exact.weights.push_back(a.weight);
        }
        std::vector<double> pos, w;
        for (const auto& a : sm.approx.atoms()) {
            pos.push_back(a.path[0]);
            w.push_back(a.weight);
        }
        double lo = *std::min_element(pos.begin(), pos.end()) - 12 * sigma;
        double hi = *std::max_element(pos.begin(), pos.end()) + 12 * sigma;
        double exact_w1 = oracles::w1_step_vs_cdf(pos, w, [&](double x) { return exact.cdf(x); },
                                                  lo, hi);
        CHECK(exact_w1 <= sm.budget_w() + 1e-9);
    }
}

TEST_CASE("smooth wasserstein") {
    std::mt19937_64 rng(71);
    NoiseModel noise = NoiseModel::gaussian(2);
    PathMeasure m = random_measure(rng, 1, 2, 4);
    SmoothScheme scheme;
    scheme.grid_step = 0.25;
    scheme.radius_mult = 2.5;
    auto same = smooth_w(m, m, noise, 1.0, 0.5, scheme);
    CHECK(same.value <= 2.0 * same.budget + 1e-12);
    CHECK(same.value == doctest::Approx(0.0).epsilon(1e-12));

    // two point masses: the smoothed W_p equals |a - b| for every p
    NoiseModel n1 = NoiseModel::gaussian(1);
    PathMeasure pa = line_measure({{-0.6, 1.0}});
    PathMeasure pb = line_measure({{0.9, 1.0}});
    SmoothScheme fine;
    fine.grid_step = 0.02;
    fine.radius_mult = 5.0;
    for (double p : {1.0, 2.0}) {
        auto r = smooth_w(pa, pb, n1, p, 0.3, fine);
        CHECK(std::fabs(r.value - 1.5) <= r.budget + 1e-9);
    }
}

TEST_CASE("smooth distances are lipschitz in sigma") {
    std::mt19937_64 rng(73);
    NoiseModel noise = NoiseModel::gaussian(2);
    for (int trial = 0; trial < 6; ++trial) {
        PathMeasure a = random_measure(rng, 1, 2, 4);
        PathMeasure b = random_measure(rng, 1, 2, 4);
        double p = 1.0 + trial % 2;
        double s1 = uniform(rng, 0.3, 0.6), s2 = s1 + uniform(rng, 0.1, 0.4);
        SmoothScheme scheme;
        scheme.grid_step = 0.5 * s2;
        scheme.radius_mult = 2.5;
        auto r1 = smooth_w(a, b, noise, p, s1, scheme);
        auto r2 = smooth_w(a, b, noise, p, s2, scheme);
        double bound = 2.0 * (s2 - s1) * std::pow(noise.moment_p(p), 1.0 / p);
        CHECK(std::fabs(r1.value - r2.value) <= bound + r1.budget + r2.budget + 1e-9);
    }
}

TEST_CASE("smooth adapted distance matches the quadrature oracle") {
    PathMeasure mu(1, 2, {{{0.0, 1.0}, 0.5}, {{0.0, -1.0}, 0.5}});
    PathMeasure mu_eps(1, 2, {{{0.5, 1.0}, 0.5}, {{-0.5, -1.0}, 0.5}});
    NoiseModel noise = NoiseModel::gaussian(2);
    SmoothScheme scheme;
    scheme.grid_step = 0.03125;
    scheme.radius_mult = 5.0;
    auto grid = smooth_aw(mu, mu_eps, noise, 1.0, 0.5, scheme);
    double exact = standard_example_smooth_aw(0.5, 0.5, 1.0);
    CHECK(std::fabs(grid.value - exact) <= grid.budget + 1e-6);

    auto same = smooth_aw(mu, mu, noise, 1.0, 0.5, scheme);
    CHECK(same.value <= 2.0 * same.budget + 1e-12);

    // symmetry is exact, triangle holds within budgets
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 4; ++trial) {
        PathMeasure a = random_measure(rng, 1, 2, 3);
        PathMeasure b = random_measure(rng, 1, 2, 3);
        PathMeasure c = random_measure(rng, 1, 2, 3);
        SmoothScheme s;
        s.grid_step = 0.125;
        s.radius_mult = 3.0;
        auto ab = smooth_aw(a, b, noise, 1.0, 0.5, s);
        auto ba = smooth_aw(b, a, noise, 1.0, 0.5, s);
        auto ac = smooth_aw(a, c, noise, 1.0, 0.5, s);
        auto cb = smooth_aw(c, b, noise, 1.0, 0.5, s);
        CHECK(ab.value == doctest::Approx(ba.value).epsilon(1e-10));
        CHECK(ab.value <= ac.value + cb.value + ac.budget + cb.budget + 1e-7);
    }
}

TEST_CASE("standard-pair oracle behavior") {
    CHECK(standard_example_smooth_aw(0.0, 0.7, 1.0) == 0.0);

    // slow sequence: values decay once eps/sigma goes to zero
    double prev = 1e300;
    for (int n : {4, 16, 64, 256}) {
        double v = standard_example_smooth_aw(1.0 / n, 1.0 / std::sqrt(double(n)), 1.0);
        CHECK(v < prev);
        prev = v;
    }

    // eps/sigma -> infinity keeps the p-power value near 2^{p-1}
    for (double p : {1.0, 2.0}) {
        double v = standard_example_smooth_aw(0.5, 0.002, p);
        CHECK(std::pow(v, p) >= std::exp2(p - 1.0) * 0.97);
    }

    CHECK(modulus_standard_example(0.2, 0.2, 1.0) == doctest::Approx(1.0));
    CHECK(modulus_standard_example(0.2, 0.5, 2.0) == doctest::Approx(2.0));
    CHECK(modulus_standard_example(0.2, 1e-9, 1.0) < 1e-8);
}

TEST_CASE("grid cap and dimension checks") {
    PathMeasure m = line_measure({{0.0, 1.0}});
    SmoothScheme tiny;
    tiny.grid_step = 1e-7;
    tiny.cell_cap = 1000;
    CHECK_THROWS_WITH_AS(convolve_quantized(m, NoiseModel::gaussian(1), 0.5, 1.0, tiny),
                         doctest::Contains("cells"), ValidationError);
    CHECK_THROWS_AS(convolve_quantized(m, NoiseModel::gaussian(3), 0.5, 1.0, {}),
                    ValidationError);
}
