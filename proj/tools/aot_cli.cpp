#include "aot/adapted.hpp"
#include "aot/errors.hpp"
#include "aot/harness.hpp"
#include "aot/measure_io.hpp"
#include "aot/moduli.hpp"
#include "aot/ot.hpp"
#include "aot/parallel.hpp"
#include "aot/path_measure.hpp"
#include "aot/rng.hpp"
#include "aot/smoothing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

namespace {

using nlohmann::ordered_json;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// CSV carries full-precision scientific notation so downstream fits are not
// precision-limited
std::string fmt_csv(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw aot::ValidationError("invalid-json: cannot write " + out_path);
        out << text;
    }
}

struct DistOptions {
    std::string kind;
    std::string a, b;
    double p = 1.0;
    std::string out;
    std::string format = "plain";
};

int run_dist(const DistOptions& o) {
    aot::PathMeasure mu = aot::load_measure(o.a);
    aot::PathMeasure nu = aot::load_measure(o.b);
    double value = 0.0;
    if (o.kind == "w") {
        value = aot::wasserstein_value(aot::PointCloud::from_measure(mu),
                                       aot::PointCloud::from_measure(nu), o.p);
    } else if (o.kind == "aw") {
        value = aot::aw_value(mu, nu, o.p);
    } else if (o.kind == "av") {
        value = aot::av(mu, nu);
    } else {
        value = aot::tv_distance(mu, nu);
    }
    if (o.format == "json") {
        ordered_json j{{"kind", o.kind}, {"p", o.p}, {"value", value}};
        emit(j.dump(2) + "\n", o.out);
    } else if (o.format == "csv") {
        emit("kind,p,value\n" + o.kind + "," + fmt_csv(o.p) + "," + fmt_csv(value) + "\n",
             o.out);
    } else {
        emit(fmt17(value) + "\n", o.out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adapted optimal transport toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (default: machine cores)");

    DistOptions dist;
    auto* cmd_dist = app.add_subcommand("dist", "distance between two measure files");
    cmd_dist->add_option("kind", dist.kind, "w|aw|av|tv")->required();
    cmd_dist->add_option("A", dist.a, "left measure JSON")->required();
    cmd_dist->add_option("B", dist.b, "right measure JSON")->required();
    cmd_dist->add_option("--p", dist.p, "order p >= 1");
    cmd_dist->add_option("--out", dist.out, "write result to file");
    cmd_dist->add_option("--format", dist.format, "plain|json|csv");

    DistOptions sdist;
    double sigma = 0.5, grid_step = 0.0, radius_mult = 6.0;
    std::string noise_kind = "gaussian";
    auto* cmd_sdist = app.add_subcommand("smooth-dist", "smooth distance between two measures");
    cmd_sdist->add_option("kind", sdist.kind, "w|aw")->required();
    cmd_sdist->add_option("A", sdist.a)->required();
    cmd_sdist->add_option("B", sdist.b)->required();
    cmd_sdist->add_option("--p", sdist.p, "order p >= 1");
    cmd_sdist->add_option("--sigma", sigma, "noise scale")->required();
    cmd_sdist->add_option("--grid-step", grid_step, "lattice step (default sigma/20)");
    cmd_sdist->add_option("--radius-mult", radius_mult, "truncation radius in sigmas");
    cmd_sdist->add_option("--noise", noise_kind, "gaussian|uniform");
    cmd_sdist->add_option("--out", sdist.out);
    cmd_sdist->add_option("--format", sdist.format, "plain|json|csv");

    std::string m_in, m_out;
    int m_t = 1;
    double m_p = 1.0;
    std::vector<double> m_deltas;
    auto* cmd_mod = app.add_subcommand("modulus", "modulus of continuity curve");
    cmd_mod->add_option("A", m_in)->required();
    cmd_mod->add_option("--t", m_t, "time index, 1 <= t <= T-1")->required();
    cmd_mod->add_option("--p", m_p);
    cmd_mod->add_option("--delta", m_deltas, "budget values")->required()->expected(-1);
    cmd_mod->add_option("--out", m_out);

    std::string h_in, h_out;
    double h_p = 1.0, h_sigma = 0.5;
    auto* cmd_h = app.add_subcommand("h-iter", "iterated modulus h^{0..T-1}");
    cmd_h->add_option("A", h_in)->required();
    cmd_h->add_option("--p", h_p);
    cmd_h->add_option("--sigma", h_sigma)->required();
    cmd_h->add_option("--out", h_out);

    std::string c_in, c_out;
    double c_radius = 1.0;
    auto* cmd_clip = app.add_subcommand("clip", "per-time radial clipping");
    cmd_clip->add_option("A", c_in)->required();
    cmd_clip->add_option("--radius", c_radius)->required();
    cmd_clip->add_option("--out", c_out);

    std::string b_suite = "core", b_out;
    std::uint64_t b_seed = 20240917;
    auto* cmd_bounds = app.add_subcommand("bounds", "inequality verification suites");
    auto* cmd_bounds_run = cmd_bounds->add_subcommand("run", "run a suite");
    cmd_bounds_run->add_option("--suite", b_suite, "core|smoothing|topology|rates");
    cmd_bounds_run->add_option("--seed", b_seed);
    cmd_bounds_run->add_option("--out", b_out, "write JSON report");

    double r_p = 1.0, r_q = 4.0, r_sigma = 0.5;
    int r_seeds = 20;
    std::uint64_t r_seed = 20240917;
    std::string r_out;
    auto* cmd_rates = app.add_subcommand("rates", "empirical convergence rate experiment");
    auto* cmd_rates_run = cmd_rates->add_subcommand("run", "run the default experiment");
    cmd_rates_run->add_option("--p", r_p);
    cmd_rates_run->add_option("--q", r_q);
    cmd_rates_run->add_option("--sigma", r_sigma);
    cmd_rates_run->add_option("--seeds", r_seeds);
    cmd_rates_run->add_option("--seed", r_seed);
    cmd_rates_run->add_option("--out", r_out);

    double e_eps = 0.1, e_sigma = 1.0, e_p = 1.0;
    std::string e_out;
    auto* cmd_ex = app.add_subcommand("example", "closed-form standard-pair values");
    auto* cmd_ex_std = cmd_ex->add_subcommand("standard", "smooth adapted distance oracle");
    cmd_ex_std->add_option("--eps", e_eps)->required();
    cmd_ex_std->add_option("--sigma", e_sigma)->required();
    cmd_ex_std->add_option("--p", e_p);
    cmd_ex_std->add_option("--out", e_out);

    CLI11_PARSE(app, argc, argv);
    if (threads > 0) aot::set_max_threads(threads);

    try {
        if (*cmd_dist) {
            if (dist.kind != "w" && dist.kind != "aw" && dist.kind != "av" && dist.kind != "tv")
                throw aot::ValidationError("invalid-measure: dist kind must be w|aw|av|tv");
            return run_dist(dist);
        }
        if (*cmd_sdist) {
            if (sdist.kind != "w" && sdist.kind != "aw")
                throw aot::ValidationError("invalid-measure: smooth-dist kind must be w|aw");
            aot::PathMeasure mu = aot::load_measure(sdist.a);
            aot::PathMeasure nu = aot::load_measure(sdist.b);
            const int N = mu.d() * mu.T();
            aot::NoiseModel noise = noise_kind == "uniform" ? aot::NoiseModel::uniform_ball(N)
                                                            : aot::NoiseModel::gaussian(N);
            aot::SmoothScheme scheme;
            scheme.grid_step = grid_step;
            scheme.radius_mult = radius_mult;
            aot::SmoothResult r = sdist.kind == "w"
                                      ? aot::smooth_w(mu, nu, noise, sdist.p, sigma, scheme)
                                      : aot::smooth_aw(mu, nu, noise, sdist.p, sigma, scheme);
            if (sdist.format == "json") {
                ordered_json j{{"kind", sdist.kind}, {"p", sdist.p},      {"sigma", sigma},
                               {"value", r.value},   {"budget", r.budget}};
                emit(j.dump(2) + "\n", sdist.out);
            } else if (sdist.format == "csv") {
                emit("kind,p,sigma,value,budget\n" + sdist.kind + "," + fmt_csv(sdist.p) + "," +
                         fmt_csv(sigma) + "," + fmt_csv(r.value) + "," + fmt_csv(r.budget) +
                         "\n",
                     sdist.out);
            } else {
                emit(fmt17(r.value) + " " + fmt17(r.budget) + "\n", sdist.out);
            }
            return 0;
        }
        if (*cmd_mod) {
            aot::PathMeasure mu = aot::load_measure(m_in);
            aot::ModulusCurve curve = aot::modulus_curve(mu, m_t, m_p, m_deltas);
            ordered_json samples = ordered_json::array();
            for (const auto& [delta, value] : curve.samples)
                samples.push_back({{"delta", delta}, {"value", value}});
            ordered_json j{{"t", curve.t}, {"p", curve.p}, {"samples", samples}};
            emit(j.dump(2) + "\n", m_out);
            return 0;
        }
        if (*cmd_h) {
            aot::PathMeasure mu = aot::load_measure(h_in);
            auto h = aot::h_iteration(mu, h_p, h_sigma);
            ordered_json j{{"p", h_p}, {"sigma", h_sigma}, {"h", h}};
            emit(j.dump(2) + "\n", h_out);
            return 0;
        }
        if (*cmd_clip) {
            aot::PathMeasure mu = aot::load_measure(c_in);
            aot::PathMeasure clipped = aot::clip(mu, c_radius);
            emit(aot::measure_to_json(clipped).dump(2) + "\n", c_out);
            return 0;
        }
        if (*cmd_bounds) {
            auto res = aot::harness::run_suite(b_suite, b_seed);
            emit(res.to_json().dump(2) + "\n", b_out);
            int dominated = 0;
            for (const auto& r : res.reports)
                if (r.budget_dominated) ++dominated;
            std::cerr << "suite=" << res.suite << " seed=" << res.seed
                      << " reports=" << res.reports.size() << " failures=" << res.failures()
                      << " budget_dominated=" << dominated << "\n";
            return res.failures() == 0 ? 0 : 1;
        }
        if (*cmd_rates) {
            std::mt19937_64 rng(r_seed + 424243);
            auto weights = aot::dirichlet_weights(rng, 8);
            std::vector<aot::Atom> atoms;
            for (int i = 0; i < 8; ++i) {
                aot::Atom a;
                a.path = {aot::uniform(rng, -1.2, 1.2), aot::uniform(rng, -1.2, 1.2)};
                a.weight = weights[i];
                atoms.push_back(std::move(a));
            }
            aot::PathMeasure mu(1, 2, std::move(atoms));
            auto fit = aot::harness::run_rate_experiment(
                mu, r_p, r_q, r_sigma, {32, 64, 128, 256, 512, 1024, 2048}, r_seeds, r_seed);
            ordered_json j{{"p", r_p},
                           {"q", r_q},
                           {"sigma", r_sigma},
                           {"ns", fit.ns},
                           {"values", fit.values},
                           {"slope", fit.slope},
                           {"intercept", fit.intercept},
                           {"residual", fit.residual},
                           {"theory_exponent", -(r_q - r_p) / (2.0 * r_q)}};
            emit(j.dump(2) + "\n", r_out);
            return 0;
        }
        if (*cmd_ex) {
            double v = aot::standard_example_smooth_aw(e_eps, e_sigma, e_p);
            emit(fmt17(v) + "\n", e_out);
            return 0;
        }
    } catch (const aot::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const aot::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
