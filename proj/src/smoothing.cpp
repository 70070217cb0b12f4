#include "aot/smoothing.hpp"

#include "aot/adapted.hpp"
#include "aot/errors.hpp"
#include "aot/ot.hpp"
#include "aot/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace aot {

namespace {

double pow_p(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    return std::pow(x, p);
}

struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& k) const {
        std::size_t h = 1469598103934665603ull;
        for (std::int64_t v : k) {
            h ^= static_cast<std::size_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace

double SmoothedApprox::budget_w() const {
    return std::pow(quant_cost_w + trunc_charge, 1.0 / p);
}

double SmoothedApprox::budget_aw() const {
    return std::pow(quant_cost_aw + trunc_charge, 1.0 / p);
}

SmoothedApprox convolve_quantized(const PathMeasure& mu, const NoiseModel& noise,
                                  double sigma, double p, SmoothScheme scheme) {
    if (!(sigma > 0.0)) throw ValidationError("invalid-measure: sigma must be positive");
    if (!(p >= 1.0)) throw ValidationError("invalid-measure: p must be >= 1");
    const int d = mu.d(), T = mu.T();
    const int N = d * T;
    if (noise.dim() != N)
        throw ValidationError("dimension-mismatch: noise dimension " +
                              std::to_string(noise.dim()) + " vs path dimension " +
                              std::to_string(N));
    double step = scheme.grid_step > 0.0 ? scheme.grid_step : sigma / 20.0;
    if (scheme.snap_pow2)
        step = sigma * std::exp2(std::round(std::log2(step / sigma)));
    const int K = std::max(0, static_cast<int>(std::floor(scheme.radius_mult * sigma / step + 1e-9)));
    const int nodes = 2 * K + 1;
    double per_atom = std::pow(static_cast<double>(nodes), N);
    double total_cells = per_atom * static_cast<double>(mu.size());
    if (total_cells > static_cast<double>(scheme.cell_cap))
        throw ValidationError(
            "invalid-grid: " + std::to_string(static_cast<long long>(total_cells)) +
            " cells exceed the cap of " + std::to_string(scheme.cell_cap) +
            " (" + std::to_string(nodes) + " nodes per coordinate x " + std::to_string(N) +
            " coordinates x " + std::to_string(mu.size()) +
            " atoms); increase the grid step or lower the radius multiplier");

    // per-coordinate cell masses (equal across coordinates for both kinds)
    std::vector<double> cell(nodes);
    for (int k = -K; k <= K; ++k)
        cell[k + K] = noise.coord_cdf((k + 0.5) * step / sigma) -
                      noise.coord_cdf((k - 0.5) * step / sigma);
    double kappa = 0.0;
    for (double c : cell) kappa += c;

    // mean absolute within-cell displacement of one coordinate (p = 1 budget);
    // inflated by the quadrature tolerance so the budget stays an upper bound
    double m1 = 0.0;
    if (p == 1.0) {
        for (int k = -K; k <= K; ++k) {
            double lo = (k - 0.5) * step / sigma, hi = (k + 0.5) * step / sigma;
            double center = k * step / sigma;
            m1 += integrate([&](double u) { return std::fabs(u - center) * noise.coord_pdf(u); },
                            lo, hi, 1e-14, 1e-10)
                      .value;
        }
        m1 = m1 * sigma / kappa * (1.0 + 1e-7) + 1e-12 * sigma;
    }
    const double off1 = (p == 1.0) ? m1 : 0.5 * step;
    const double sqN = std::sqrt(static_cast<double>(N));
    const double sqd = std::sqrt(static_cast<double>(d));

    std::unordered_map<std::vector<std::int64_t>, double, KeyHash> acc;
    acc.reserve(static_cast<std::size_t>(total_cells));
    std::vector<std::int64_t> base(N), key(N);
    std::vector<int> digit(N);
    double avg_move = 0.0;
    double quant_cost_w = 0.0, quant_cost_aw = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto& atom = mu.atom(i);
        double move2 = 0.0;
        double quant_aw = 0.0;
        for (int c = 0; c < N; ++c) {
            base[c] = std::llround(atom.path[c] / step);
            double mv = atom.path[c] - step * static_cast<double>(base[c]);
            move2 += mv * mv;
        }
        for (int t = 0; t < T; ++t) {
            double mt2 = 0.0;
            for (int c = 0; c < d; ++c) {
                double mv = atom.path[t * d + c] - step * static_cast<double>(base[t * d + c]);
                mt2 += mv * mv;
            }
            double disp = std::sqrt(mt2) + (p == 1.0 ? d * m1 : sqd * off1);
            quant_aw += pow_p(disp, p);
        }
        double move = std::sqrt(move2);
        avg_move += atom.weight * move;
        quant_cost_aw += atom.weight * quant_aw;
        quant_cost_w += atom.weight * pow_p(move + (p == 1.0 ? N * m1 : sqN * off1), p);

        std::fill(digit.begin(), digit.end(), -K);
        while (true) {
            double w = atom.weight;
            for (int c = 0; c < N; ++c) {
                w *= cell[digit[c] + K];
                key[c] = base[c] + digit[c];
            }
            if (w > 0.0) acc[key] += w;
            int c = 0;
            while (c < N && digit[c] == K) digit[c++] = -K;
            if (c == N) break;
            ++digit[c];
        }
    }

    double kept = 0.0;
    for (const auto& [k, w] : acc) kept += w;

    std::vector<Atom> atoms;
    atoms.reserve(acc.size());
    for (const auto& [k, w] : acc) {
        Atom a;
        a.weight = w / kept;
        a.path.resize(N);
        for (int c = 0; c < N; ++c) a.path[c] = step * static_cast<double>(k[c]);
        atoms.push_back(std::move(a));
    }

    SmoothedApprox out{PathMeasure(d, T, std::move(atoms))};
    out.sigma = sigma;
    out.p = p;
    out.grid_step = step;
    out.quant_cost_w = quant_cost_w;
    out.quant_cost_aw = quant_cost_aw;
    out.trunc_mass = std::max(0.0, 1.0 - kept);
    out.trunc_charge = out.trunc_mass * pow_p(scheme.radius_mult * sigma * sqN, p);
    out.tv_budget = out.trunc_mass + out.trunc_mass / std::max(1e-12, 1.0 - out.trunc_mass) +
                    noise.grad_l1() / sigma * avg_move;
    out.tv_budget_abs = out.tv_budget + noise.grad_l1() / sigma * 2.0 * step * sqN;
    return out;
}

SmoothResult smooth_w(const PathMeasure& mu, const PathMeasure& nu, const NoiseModel& noise,
                      double p, double sigma, SmoothScheme scheme, Execution ex) {
    if (!mu.same_shape(nu))
        throw ValidationError("dimension-mismatch: smooth_w requires equal d and T");
    SmoothedApprox a = convolve_quantized(mu, noise, sigma, p, scheme);
    SmoothedApprox b = convolve_quantized(nu, noise, sigma, p, scheme);
    double pairs = static_cast<double>(a.approx.size()) * static_cast<double>(b.approx.size());
    if (pairs > 2.5e7)
        throw ValidationError("invalid-grid: smoothed transport problem has " +
                              std::to_string(static_cast<long long>(pairs)) +
                              " atom pairs; coarsen the grid");
    double value = wasserstein_p(PointCloud::from_measure(a.approx),
                                 PointCloud::from_measure(b.approx), p, ex)
                       .value;
    return {value, a.budget_w() + b.budget_w()};
}

SmoothResult smooth_aw(const PathMeasure& mu, const PathMeasure& nu, const NoiseModel& noise,
                       double p, double sigma, SmoothScheme scheme, Execution ex) {
    if (!mu.same_shape(nu))
        throw ValidationError("dimension-mismatch: smooth_aw requires equal d and T");
    scheme.snap_pow2 = true;
    SmoothedApprox a = convolve_quantized(mu, noise, sigma, p, scheme);
    SmoothedApprox b = convolve_quantized(nu, noise, sigma, p, scheme);
    double value = aw_value(a.approx, b.approx, p, ex);
    return {value, a.budget_aw() + b.budget_aw()};
}

double smoothed_tail_upper(const PathMeasure& mu, const NoiseModel& noise, double sigma,
                           double p, double R) {
    // |x + sigma Z| <= |x| + sigma |Z|, so integrate the radial law from the
    // first radius that can reach R.
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double a = mu.path_norm(i);
        const double w = mu.atom(i).weight;
        if (noise.compact()) {
            if (a + sigma >= R) total += w * pow_p(a + sigma, p);
            continue;
        }
        const double s0 = std::max(0.0, (R - a) / sigma);
        const int N = noise.dim();
        auto integrand = [&](double s) {
            return pow_p(a + sigma * s, p) * gaussian_radial_pdf(N, s);
        };
        const double hi = std::max(s0, std::sqrt(static_cast<double>(N))) + 42.0;
        total += w * integrate_panels(integrand, s0, hi, 24, 1e-13, 1e-11).value;
    }
    return total;
}

double smoothed_moment_upper(const PathMeasure& mu, const NoiseModel& noise, double sigma,
                             double q) {
    return smoothed_tail_upper(mu, noise, sigma, q, 0.0);
}

// ---- standard-pair oracles --------------------------------------------------

double GaussianMixture1D::cdf(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < means.size(); ++k)
        s += weights[k] * 0.5 * std::erfc(-(x - means[k]) / (sigma * 1.4142135623730951));
    return s;
}

double GaussianMixture1D::quantile(double u) const {
    double lo = means[0], hi = means[0];
    for (double m : means) {
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    lo -= 14.0 * sigma;
    hi += 14.0 * sigma;
    for (int it = 0; it < 90; ++it) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double mixture_wp(const GaussianMixture1D& f, const GaussianMixture1D& g, double p) {
    if (p == 1.0) {
        double lo = f.means[0], hi = f.means[0];
        for (double m : f.means) {
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        for (double m : g.means) {
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        double pad = 13.0 * std::max(f.sigma, g.sigma);
        auto q = integrate_panels([&](double x) { return std::fabs(f.cdf(x) - g.cdf(x)); },
                                  lo - pad, hi + pad, 16, 1e-11, 1e-9);
        return q.value;
    }
    auto q = integrate_panels(
        [&](double u) {
            double uc = std::min(1.0 - 1e-13, std::max(1e-13, u));
            return pow_p(std::fabs(f.quantile(uc) - g.quantile(uc)), p);
        },
        0.0, 1.0, 8, 1e-10, 1e-8, 30);
    return std::pow(q.value, 1.0 / p);
}

double standard_example_smooth_aw(double eps, double sigma, double p) {
    if (eps < 0.0 || !(sigma > 0.0) || !(p >= 1.0))
        throw ValidationError("invalid-measure: standard example needs eps >= 0, sigma > 0, p >= 1");
    if (eps == 0.0) return 0.0;

    // first-coordinate marginals
    GaussianMixture1D m1{{0.0}, {1.0}, sigma};
    GaussianMixture1D m1e{{eps, -eps}, {0.5, 0.5}, sigma};
    double term1 = pow_p(mixture_wp(m1, m1e, p), p);

    // kernel of the centered measure does not depend on the first coordinate
    GaussianMixture1D kappa{{1.0, -1.0}, {0.5, 0.5}, sigma};
    auto inner = [&](double y) {
        // posterior weight of the +eps branch given first coordinate y
        double c = 1.0 / (1.0 + std::exp(-2.0 * y * eps / (sigma * sigma)));
        GaussianMixture1D my{{1.0, -1.0}, {c, 1.0 - c}, sigma};
        return pow_p(mixture_wp(kappa, my, p), p);
    };
    // outer integral over the first coordinate of mu_eps^sigma; both branch
    // centers contribute the same by symmetry
    constexpr double kInvSqrt2Pi = 0.39894228040143268;
    auto q = integrate_panels(
        [&](double u) { return inner(eps + sigma * u) * kInvSqrt2Pi * std::exp(-0.5 * u * u); },
        -9.0, 9.0, 12, 1e-9, 1e-7, 24);
    if (!q.converged && q.residual > 1e-5)
        throw NumericError("numeric: standard-example quadrature did not converge (residual " +
                           std::to_string(q.residual) + ")");
    return std::pow(term1 + q.value, 1.0 / p);
}

double modulus_standard_example(double eps, double delta, double p) {
    (void)p; // the closed form does not depend on p
    if (!(eps > 0.0) || !(delta > 0.0))
        throw ValidationError("invalid-measure: eps and delta must be positive");
    return std::min(delta / eps, 2.0);
}

} // namespace aot
