#include "aot/moduli.hpp"

#include "aot/errors.hpp"
#include "aot/ot.hpp"

#include <cmath>
#include <limits>

namespace aot {

namespace {

double pow_p(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    return std::pow(x, p);
}

void check_t(const PathMeasure& mu, int t) {
    if (t < 1 || t > mu.T() - 1)
        throw ValidationError("invalid-measure: modulus time must satisfy 1 <= t <= T-1, got " +
                              std::to_string(t) + " with T=" + std::to_string(mu.T()));
}

/// One-step kernel of a prefix node as a point cloud on R^d.
PointCloud kernel_cloud(const DisintegrationTree& tree, int node) {
    PointCloud pc;
    pc.dim = tree.source().d();
    const auto& children = tree.node(node).children;
    pc.coords.reserve(children.size() * pc.dim);
    pc.weights.reserve(children.size());
    for (int c : children) {
        const double* s = tree.step_of(c);
        pc.coords.insert(pc.coords.end(), s, s + pc.dim);
        pc.weights.push_back(tree.node(c).cond_weight);
    }
    return pc;
}

/// Conditional law of the full future given a prefix node, flattened to a
/// point cloud on R^{d (T - t)}.
PointCloud future_cloud(const DisintegrationTree& tree, int node) {
    const PathMeasure& mu = tree.source();
    const int d = mu.d(), T = mu.T();
    const int t = tree.node(node).depth;
    PointCloud pc;
    pc.dim = d * (T - t);
    double node_mass = tree.node(node).mass;
    // leaves under `node` in deterministic child order
    std::vector<int> stack{node};
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        if (tree.node(cur).depth == T) {
            const auto& path = mu.atom(tree.node(cur).rep_atom).path;
            pc.coords.insert(pc.coords.end(), path.begin() + static_cast<std::ptrdiff_t>(t) * d,
                             path.end());
            pc.weights.push_back(tree.node(cur).mass / node_mass);
            continue;
        }
        const auto& ch = tree.node(cur).children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return pc;
}

struct PrefixLp {
    std::vector<double> masses;
    CostMatrix gain;
    CostMatrix cost;
};

template <class GainFn>
PrefixLp build_prefix_lp(const DisintegrationTree& tree, int t, double p, Execution ex,
                         GainFn&& kernel_gain) {
    const auto& level = tree.at_depth(t);
    const int n = static_cast<int>(level.size());
    PrefixLp lp;
    lp.masses.reserve(n);
    for (int id : level) lp.masses.push_back(tree.node(id).mass);
    lp.gain = CostMatrix(n, n);
    lp.cost = CostMatrix(n, n);
    const int pd = tree.source().d() * t;
    // kernel distances are symmetric; fill the upper triangle in parallel
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
    std::vector<double> gains(pairs.size());
    parallel_for(pairs.size(), ex,
                 [&](std::size_t k) { gains[k] = kernel_gain(level[pairs[k].first], level[pairs[k].second]); });
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        auto [i, j] = pairs[k];
        lp.gain.at(i, j) = lp.gain.at(j, i) = gains[k];
        double c = detail::pow_dist(tree.prefix_of(level[i]), tree.prefix_of(level[j]), pd, p);
        lp.cost.at(i, j) = lp.cost.at(j, i) = c;
    }
    return lp;
}

ModulusResult solve_modulus(const PrefixLp& lp, double p, double delta) {
    auto res = constrained_max_ot(lp.masses, lp.masses, lp.gain, lp.cost, pow_p(delta, p));
    return {std::pow(std::max(0.0, res.value), 1.0 / p), res.budget_tight};
}

} // namespace

ModulusResult modulus_omega_full(const PathMeasure& mu, int t, double p, double delta,
                                 Execution ex) {
    check_t(mu, t);
    if (!(p >= 1.0) || !(delta > 0.0))
        throw ValidationError("invalid-measure: modulus needs p >= 1 and delta > 0");
    DisintegrationTree tree = disintegrate(mu);
    PrefixLp lp = build_prefix_lp(tree, t, p, ex, [&](int a, int b) {
        return pow_p(wasserstein_value(kernel_cloud(tree, a), kernel_cloud(tree, b), p,
                                       Execution::serial),
                     p);
    });
    return solve_modulus(lp, p, delta);
}

double modulus_omega(const PathMeasure& mu, int t, double p, double delta, Execution ex) {
    return modulus_omega_full(mu, t, p, delta, ex).value;
}

double extended_modulus_omega_bar(const PathMeasure& mu, int t, double p, double delta,
                                  Execution ex) {
    check_t(mu, t);
    if (!(p >= 1.0) || !(delta > 0.0))
        throw ValidationError("invalid-measure: modulus needs p >= 1 and delta > 0");
    DisintegrationTree tree = disintegrate(mu);
    PrefixLp lp = build_prefix_lp(tree, t, p, ex, [&](int a, int b) {
        return pow_p(wasserstein_value(future_cloud(tree, a), future_cloud(tree, b), p,
                                       Execution::serial),
                     p);
    });
    return solve_modulus(lp, p, delta).value;
}

std::vector<double> g_recursion(const PathMeasure& mu, int t, double p, double delta,
                                Execution ex) {
    check_t(mu, t);
    std::vector<double> g;
    double acc = 0.0;
    for (int s = t; s <= mu.T() - 1; ++s) {
        double gs = modulus_omega(mu, s, p, delta + acc, ex);
        g.push_back(gs);
        acc += gs;
    }
    return g;
}

std::vector<double> h_iteration(const PathMeasure& mu, double p, double sigma, Execution ex) {
    if (!(sigma > 0.0)) throw ValidationError("invalid-measure: sigma must be positive");
    std::vector<double> h{sigma};
    double acc = sigma;
    for (int t = 1; t <= mu.T() - 1; ++t) {
        double ht = modulus_omega(mu, t, p, acc, ex);
        h.push_back(ht);
        acc += ht;
    }
    return h;
}

double holder_constant(const PathMeasure& mu, double p, double alpha, Execution ex) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw ValidationError("invalid-measure: alpha must lie in (0, 1]");
    DisintegrationTree tree = disintegrate(mu);
    double best = 0.0;
    for (int t = 1; t <= mu.T() - 1; ++t) {
        const auto& level = tree.at_depth(t);
        const int n = static_cast<int>(level.size());
        const int pd = mu.d() * t;
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
        std::vector<double> ratios(pairs.size(), 0.0);
        parallel_for(pairs.size(), ex, [&](std::size_t k) {
            auto [i, j] = pairs[k];
            double dist = std::sqrt(detail::pow_dist(tree.prefix_of(level[i]),
                                                     tree.prefix_of(level[j]), pd, 2.0));
            double w = wasserstein_value(kernel_cloud(tree, level[i]),
                                         kernel_cloud(tree, level[j]), p, Execution::serial);
            ratios[k] = dist == 0.0
                            ? (w == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                            : w / std::pow(dist, alpha);
        });
        for (double r : ratios) best = std::max(best, r);
    }
    return best;
}

ModulusCurve modulus_curve(const PathMeasure& mu, int t, double p,
                           const std::vector<double>& deltas, Execution ex) {
    check_t(mu, t);
    DisintegrationTree tree = disintegrate(mu);
    PrefixLp lp = build_prefix_lp(tree, t, p, ex, [&](int a, int b) {
        return pow_p(wasserstein_value(kernel_cloud(tree, a), kernel_cloud(tree, b), p,
                                       Execution::serial),
                     p);
    });
    ModulusCurve curve;
    curve.t = t;
    curve.p = p;
    for (double delta : deltas)
        curve.samples.push_back({delta, solve_modulus(lp, p, delta).value});
    return curve;
}

} // namespace aot
