#include "aot/ot.hpp"

#include "aot/dense_simplex.hpp"
#include "aot/errors.hpp"
#include "aot/transport_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aot {

PointCloud PointCloud::from_measure(const PathMeasure& mu) {
    PointCloud pc;
    pc.dim = mu.d() * mu.T();
    pc.coords.reserve(mu.size() * pc.dim);
    pc.weights.reserve(mu.size());
    for (const auto& a : mu.atoms()) {
        pc.coords.insert(pc.coords.end(), a.path.begin(), a.path.end());
        pc.weights.push_back(a.weight);
    }
    return pc;
}

CostMatrix::CostMatrix(int r, int c)
    : rows(r), cols(c), entries(static_cast<std::size_t>(r) * c, 0.0) {}

void CostMatrix::validate() const {
    for (double v : entries)
        if (!std::isfinite(v) || v < 0.0)
            throw ValidationError("invalid-cost: cost entries must be finite and nonnegative");
}

namespace detail {

double pow_dist(const double* x, const double* y, int d, double p) {
    double s2 = 0.0;
    for (int c = 0; c < d; ++c) {
        double diff = x[c] - y[c];
        s2 += diff * diff;
    }
    if (p == 2.0) return s2;
    double n = std::sqrt(s2);
    if (p == 1.0) return n;
    return std::pow(n, p);
}

} // namespace detail

namespace {

void check_weights(const std::vector<double>& w, const char* side) {
    double s = 0.0;
    for (double v : w) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError(std::string("invalid-measure: non-positive weight on ") + side);
        s += v;
    }
    if (std::fabs(s - 1.0) > kWeightTol)
        throw ValidationError(std::string("invalid-measure: weights on ") + side +
                              " sum to " + std::to_string(s));
}

} // namespace

TransportPlan min_cost_transport(const std::vector<double>& a, const std::vector<double>& b,
                                 const CostMatrix& cost, bool need_plan, Execution ex) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (cost.rows != n || cost.cols != m)
        throw ValidationError("invalid-cost: cost matrix shape does not match the marginals");
    auto sol = detail::transport_simplex(n, m, a.data(), b.data(), cost.entries.data(),
                                         need_plan, ex);
    TransportPlan plan;
    plan.objective = sol.cost;
    if (need_plan) {
        plan.entries.reserve(sol.plan.size());
        for (const auto& e : sol.plan) plan.entries.push_back({e.i, e.j, e.mass});
    }
    return plan;
}

WassersteinResult wasserstein_p(const PointCloud& mu, const PointCloud& nu, double p,
                                Execution ex) {
    if (mu.dim != nu.dim)
        throw ValidationError("dimension-mismatch: point clouds have different dimensions");
    if (!(p >= 1.0))
        throw ValidationError("invalid-measure: p must be >= 1");
    check_weights(mu.weights, "left");
    check_weights(nu.weights, "right");
    const int n = static_cast<int>(mu.size());
    const int m = static_cast<int>(nu.size());
    CostMatrix cost(n, m);
    parallel_for(static_cast<std::size_t>(n), ex, [&](std::size_t i) {
        for (int j = 0; j < m; ++j)
            cost.at(static_cast<int>(i), j) =
                detail::pow_dist(mu.point(i), nu.point(j), mu.dim, p);
    });
    TransportPlan plan = min_cost_transport(mu.weights, nu.weights, cost, true, ex);
    WassersteinResult out;
    out.value = std::pow(plan.objective, 1.0 / p);
    out.plan = std::move(plan);
    return out;
}

double wasserstein_value(const PointCloud& mu, const PointCloud& nu, double p, Execution ex) {
    if (mu.dim == 1) {
        double v = wasserstein_1d(mu.coords, mu.weights, nu.coords, nu.weights, p);
        return v;
    }
    return wasserstein_p(mu, nu, p, ex).value;
}

double wasserstein_1d(const std::vector<double>& x, const std::vector<double>& wx,
                      const std::vector<double>& y, const std::vector<double>& wy,
                      double p) {
    const std::size_t n = x.size(), m = y.size();
    std::vector<std::size_t> ox(n), oy(m);
    std::iota(ox.begin(), ox.end(), 0);
    std::iota(oy.begin(), oy.end(), 0);
    std::sort(ox.begin(), ox.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::sort(oy.begin(), oy.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
    double cost = 0.0;
    std::size_t i = 0, j = 0;
    double ra = wx[ox[0]], rb = wy[oy[0]];
    while (true) {
        double f = std::min(ra, rb);
        double diff = std::fabs(x[ox[i]] - y[oy[j]]);
        cost += f * (p == 1.0 ? diff : (p == 2.0 ? diff * diff : std::pow(diff, p)));
        ra -= f;
        rb -= f;
        if (ra <= 1e-15) {
            if (++i >= n) break;
            ra = wx[ox[i]];
        }
        if (rb <= 1e-15) {
            if (++j >= m) break;
            rb = wy[oy[j]];
        }
    }
    return std::pow(cost, 1.0 / p);
}

ConstrainedMaxResult constrained_max_ot(const std::vector<double>& a,
                                        const std::vector<double>& b,
                                        const CostMatrix& gain, const CostMatrix& cost,
                                        double budget) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (gain.rows != n || gain.cols != m || cost.rows != n || cost.cols != m)
        throw ValidationError("invalid-cost: gain/cost shape does not match the marginals");
    if (budget < 0.0)
        throw ValidationError("invalid-cost: budget must be nonnegative");
    cost.validate();

    detail::LinearProgram lp;
    lp.num_vars = n * m;
    lp.objective.assign(lp.num_vars, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) lp.objective[i * m + j] = -gain.at(i, j); // maximize
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(lp.num_vars, 0.0);
        for (int j = 0; j < m; ++j) row[i * m + j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(a[i]);
        lp.kind.push_back('E');
    }
    for (int j = 0; j < m; ++j) {
        std::vector<double> row(lp.num_vars, 0.0);
        for (int i = 0; i < n; ++i) row[i * m + j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(b[j]);
        lp.kind.push_back('E');
    }
    {
        std::vector<double> row(lp.num_vars, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) row[i * m + j] = cost.at(i, j);
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(budget);
        lp.kind.push_back('L');
    }

    auto sol = detail::solve_lp(lp);
    if (!sol.feasible)
        throw ValidationError("invalid-cost: budget below the minimum achievable transport cost");

    ConstrainedMaxResult out;
    out.value = -sol.objective;
    double spent = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            double mass = sol.x[i * m + j];
            if (mass > 0.0) {
                out.plan.entries.push_back({i, j, mass});
                spent += mass * cost.at(i, j);
            }
        }
    out.plan.objective = out.value;
    out.budget_tight = spent >= budget - 1e-11 * (1.0 + std::fabs(budget));
    return out;
}

} // namespace aot
