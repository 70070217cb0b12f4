#pragma once

#include "aot/parallel.hpp"
#include "aot/path_measure.hpp"

#include <vector>

namespace aot {

/// Weighted point cloud in R^dim (rows of `coords`, one weight each).
struct PointCloud {
    int dim = 1;
    std::vector<double> coords; // size() * dim, row-major
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    const double* point(std::size_t i) const { return coords.data() + i * dim; }

    static PointCloud from_measure(const PathMeasure& mu);
};

/// Nonnegative finite ground costs, row-major.
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> entries;

    CostMatrix() = default;
    CostMatrix(int r, int c);
    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * cols + j]; }
    double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * cols + j]; }
    void validate() const;
};

struct PlanEntry {
    int i = 0;
    int j = 0;
    double mass = 0.0;
};

struct TransportPlan {
    std::vector<PlanEntry> entries;
    double objective = 0.0; // Sum mass * c_ij
};

struct WassersteinResult {
    double value = 0.0; // (LP optimum)^{1/p}
    TransportPlan plan;
};

/// Exact W_p with Euclidean ground cost to the p. The plan is an optimal
/// vertex of the transportation polytope.
WassersteinResult wasserstein_p(const PointCloud& mu, const PointCloud& nu, double p,
                                Execution ex = Execution::parallel);
double wasserstein_value(const PointCloud& mu, const PointCloud& nu, double p,
                         Execution ex = Execution::parallel);

/// 1-D fast path via the monotone quantile coupling. Value equals
/// wasserstein_p for dim == 1.
double wasserstein_1d(const std::vector<double>& x, const std::vector<double>& wx,
                      const std::vector<double>& y, const std::vector<double>& wy,
                      double p);

/// Generic minimum-cost transport for a given cost matrix (used by the
/// dynamic program; marginals are arbitrary equal-total weight vectors).
TransportPlan min_cost_transport(const std::vector<double>& a, const std::vector<double>& b,
                                 const CostMatrix& cost, bool need_plan = true,
                                 Execution ex = Execution::serial);

struct ConstrainedMaxResult {
    double value = 0.0; // maximized Sum pi * gain
    TransportPlan plan;
    bool budget_tight = false; // cost constraint active at the optimum
};

/// Maximizes Sum pi_ij gain_ij over couplings of (a, b) subject to
/// Sum pi_ij cost_ij <= budget. Throws ValidationError when the budget is
/// below the minimum achievable cost (impossible when a == b, since the
/// diagonal has cost 0).
ConstrainedMaxResult constrained_max_ot(const std::vector<double>& a,
                                        const std::vector<double>& b,
                                        const CostMatrix& gain, const CostMatrix& cost,
                                        double budget);

namespace detail {
/// |x - y|^p for d-dimensional points; exact fast paths for p = 1, 2.
double pow_dist(const double* x, const double* y, int d, double p);
} // namespace detail

} // namespace aot
