#include "aot/errors.hpp"
#include "aot/measure_io.hpp"
#include "aot/path_measure.hpp"
#include "aot/rng.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

using namespace aot;

namespace {

PathMeasure two_step(std::vector<std::pair<std::array<double, 2>, double>> rows) {
    std::vector<Atom> atoms;
    for (auto& [xy, w] : rows) atoms.push_back({{xy[0], xy[1]}, w});
    return PathMeasure(1, 2, std::move(atoms));
}

PathMeasure random_measure(std::mt19937_64& rng, int d, int T, int k) {
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

TEST_CASE("construction validates and normalizes") {
    CHECK_THROWS_AS(PathMeasure(1, 1, {}), ValidationError);
    CHECK_THROWS_AS(PathMeasure(1, 1, {{{0.0}, 0.5}, {{1.0}, 0.4}}), ValidationError);
    CHECK_THROWS_AS(PathMeasure(1, 1, {{{0.0}, 1.5}, {{1.0}, -0.5}}), ValidationError);
    CHECK_THROWS_AS(PathMeasure(1, 1, {{{std::nan("")}, 1.0}}), ValidationError);
    CHECK_THROWS_AS(PathMeasure(1, 2, {{{0.0}, 1.0}}), ValidationError); // wrong length

    // duplicates merge, atoms sort
    PathMeasure m(1, 1, {{{2.0}, 0.25}, {{1.0}, 0.25}, {{2.0}, 0.5}});
    REQUIRE(m.size() == 2);
    CHECK(m.atom(0).path[0] == 1.0);
    CHECK(m.atom(1).weight == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("disintegration of the standard pair") {
    PathMeasure mu_eps = two_step({{{0.5, 1.0}, 0.5}, {{-0.5, -1.0}, 0.5}});
    DisintegrationTree tree = disintegrate(mu_eps);
    const auto& level1 = tree.at_depth(1);
    REQUIRE(level1.size() == 2);
    CHECK(tree.node(level1[0]).mass == doctest::Approx(0.5));
    CHECK(tree.node(level1[1]).mass == doctest::Approx(0.5));
    CHECK(tree.node(level1[0]).children.size() == 1);
    CHECK(tree.node(level1[1]).children.size() == 1);
    CHECK(tree.node(tree.node(level1[0]).children[0]).cond_weight == doctest::Approx(1.0));
}

TEST_CASE("single-atom measure disintegrates to a chain") {
    PathMeasure m(2, 3, {{{1, 2, 3, 4, 5, 6}, 1.0}});
    DisintegrationTree tree = disintegrate(m);
    for (int t = 1; t <= 3; ++t) {
        REQUIRE(tree.at_depth(t).size() == 1);
        CHECK(tree.node(tree.at_depth(t)[0]).cond_weight == doctest::Approx(1.0));
    }
}

TEST_CASE("shared-prefix grouping and flatten round trip") {
    PathMeasure m = two_step(
        {{{0.0, 1.0}, 0.3}, {{0.0, 2.0}, 0.2}, {{1.0, 1.0}, 0.1}, {{1.0, 3.0}, 0.4}});
    DisintegrationTree tree = disintegrate(m);
    REQUIRE(tree.at_depth(1).size() == 2);
    CHECK(tree.node(tree.at_depth(1)[0]).mass == doctest::Approx(0.5));
    PathMeasure back = tree.flatten();
    REQUIRE(back.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(back.atom(i).path == m.atom(i).path);
        CHECK(back.atom(i).weight == doctest::Approx(m.atom(i).weight).epsilon(1e-12));
    }
}

TEST_CASE("flatten of disintegrate is the identity on random measures") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        int d = 1 + trial % 2, T = 2 + trial % 2;
        PathMeasure m = random_measure(rng, d, T, 5);
        PathMeasure back = disintegrate(m).flatten();
        REQUIRE(back.size() == m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            CHECK(back.atom(i).path == m.atom(i).path);
            CHECK(back.atom(i).weight == doctest::Approx(m.atom(i).weight).epsilon(1e-12));
        }
    }
}

TEST_CASE("moments and tails") {
    PathMeasure delta0(1, 2, {{{0.0, 0.0}, 1.0}});
    CHECK(moment_p(delta0, 2) == 0.0);

    PathMeasure m = two_step({{{0.0, 1.0}, 0.5}, {{0.0, -1.0}, 0.5}});
    CHECK(moment_p(m, 2) == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(11);
    PathMeasure r = random_measure(rng, 2, 2, 3);
    double direct = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        double n2 = 0.0;
        for (double x : r.atom(i).path) n2 += x * x;
        direct += r.atom(i).weight * std::pow(std::sqrt(n2), 1.7);
    }
    CHECK(moment_p(r, 1.7) == doctest::Approx(direct).epsilon(1e-12));

    // tails
    CHECK(tail_p(r, 2, 1e9) == 0.0);
    CHECK(tail_p(r, 2, 1e-300) == doctest::Approx(moment_p(r, 2)).epsilon(1e-12));
    double filtered = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r.path_norm(i) >= 1.5) filtered += r.atom(i).weight * std::pow(r.path_norm(i), 2.0);
    CHECK(tail_p(r, 2, 1.5) == doctest::Approx(filtered).epsilon(1e-12));
    double prev = moment_p(r, 2);
    for (double R : {0.5, 1.0, 2.0, 4.0}) {
        double t = tail_p(r, 2, R);
        CHECK(t <= prev + 1e-15);
        prev = t;
    }
}

TEST_CASE("total variation on discrete measures") {
    PathMeasure mu = two_step({{{0.0, 1.0}, 0.5}, {{0.0, -1.0}, 0.5}});
    PathMeasure mu_eps = two_step({{{0.2, 1.0}, 0.5}, {{-0.2, -1.0}, 0.5}});
    CHECK(tv_distance(mu, mu) == 0.0);
    CHECK(tv_distance(mu, mu_eps) == doctest::Approx(2.0));

    PathMeasure a = two_step({{{0.0, 0.0}, 0.75}, {{1.0, 1.0}, 0.25}});
    PathMeasure b = two_step({{{0.0, 0.0}, 0.25}, {{1.0, 1.0}, 0.75}});
    CHECK(tv_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));

    // metric properties on random triples
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        PathMeasure x = random_measure(rng, 1, 2, 4);
        PathMeasure y = random_measure(rng, 1, 2, 4);
        PathMeasure z = random_measure(rng, 1, 2, 4);
        CHECK(tv_distance(x, y) == doctest::Approx(tv_distance(y, x)).epsilon(1e-14));
        CHECK(tv_distance(x, z) <= tv_distance(x, y) + tv_distance(y, z) + 1e-12);
        CHECK(tv_distance(x, x) == 0.0);
    }
}

TEST_CASE("clipping") {
    PathMeasure inside = two_step({{{0.1, 0.2}, 0.6}, {{-0.3, 0.0}, 0.4}});
    PathMeasure c = clip(inside, 1.0);
    for (std::size_t i = 0; i < inside.size(); ++i) CHECK(c.atom(i).path == inside.atom(i).path);

    // a 2-D time step of norm 2R rescales to norm R
    PathMeasure m(2, 1, {{{1.2, 1.6}, 1.0}}); // norm 2.0
    PathMeasure cm = clip(m, 1.0);
    double n = std::hypot(cm.atom(0).path[0], cm.atom(0).path[1]);
    CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cm.atom(0).path[0] == doctest::Approx(0.6).epsilon(1e-12));

    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        PathMeasure r = random_measure(rng, 2, 2, 5);
        double R = uniform(rng, 0.3, 2.0);
        PathMeasure c1 = clip(r, R);
        PathMeasure c2 = clip(c1, R);
        REQUIRE(c1.size() == c2.size());
        for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c1.atom(i).path == c2.atom(i).path);
        CHECK(moment_p(c1, 2) <= moment_p(r, 2) + 1e-12);
    }
}

TEST_CASE("empirical sampling") {
    PathMeasure single(1, 2, {{{0.4, -0.7}, 1.0}});
    PathMeasure s = sample_empirical(single, 57, 99);
    REQUIRE(s.size() == 1);
    CHECK(s.atom(0).weight == 1.0);

    PathMeasure m = two_step({{{0.0, 1.0}, 0.5}, {{0.0, -1.0}, 0.5}});
    PathMeasure e1 = sample_empirical(m, 10000, 12345);
    PathMeasure e2 = sample_empirical(m, 10000, 12345);
    REQUIRE(e1.size() == e2.size());
    for (std::size_t i = 0; i < e1.size(); ++i) {
        CHECK(e1.atom(i).weight == e2.atom(i).weight);
        CHECK(std::fabs(e1.atom(i).weight - 0.5) <= 3.0 / std::sqrt(10000.0));
    }
}

TEST_CASE("quantization") {
    PathMeasure on_grid = two_step({{{0.5, 1.0}, 0.5}, {{-0.5, 0.0}, 0.5}});
    auto q = quantize(on_grid, 0.25, 2);
    CHECK(q.cost_p == 0.0);
    for (std::size_t i = 0; i < on_grid.size(); ++i)
        CHECK(q.measure.atom(i).path == on_grid.atom(i).path);

    // every coordinate offset by step/4
    const double gs = 0.2;
    PathMeasure off(1, 2, {{{1.0 * gs + gs / 4, 2.0 * gs + gs / 4}, 1.0}});
    auto q75 = quantize(off, gs, 1.5);
    CHECK(q75.cost_p ==
          doctest::Approx(std::pow(gs * std::sqrt(2.0) / 4.0, 1.5)).epsilon(1e-12));

    PathMeasure collide(1, 1, {{{0.26}, 0.5}, {{0.24}, 0.5}});
    auto qc = quantize(collide, 1.0, 1);
    REQUIRE(qc.measure.size() == 1);
    CHECK(qc.measure.atom(0).weight == doctest::Approx(1.0));
}

TEST_CASE("measure JSON round trip and diagnostics") {
    std::mt19937_64 rng(23);
    PathMeasure m = random_measure(rng, 2, 2, 4);
    save_measure(m, "io_roundtrip.json");
    PathMeasure back = load_measure("io_roundtrip.json");
    REQUIRE(back.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(back.atom(i).path == m.atom(i).path);
        CHECK(back.atom(i).weight == m.atom(i).weight);
    }
    std::remove("io_roundtrip.json");

    auto write = [](const char* name, const char* text) {
        std::ofstream out(name);
        out << text;
    };
    write("io_bad1.json", "{\"d\": 1, \"T\": 1, \"atoms\": [{\"path\": [[0.0]], \"weight\": 0.9}]}");
    CHECK_THROWS_WITH_AS(load_measure("io_bad1.json"), doctest::Contains("deficit"),
                         ValidationError);
    write("io_bad2.json", "{\"d\": 1, \"T\": 2, \"atoms\": [{\"path\": [[0.0]], \"weight\": 1.0}]}");
    CHECK_THROWS_AS(load_measure("io_bad2.json"), ValidationError);
    write("io_bad3.json", "{\"d\": 1, ");
    CHECK_THROWS_WITH_AS(load_measure("io_bad3.json"), doctest::Contains("byte"),
                         ValidationError);
    std::remove("io_bad1.json");
    std::remove("io_bad2.json");
    std::remove("io_bad3.json");
}
