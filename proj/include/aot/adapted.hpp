#pragma once

#include "aot/ot.hpp"
#include "aot/parallel.hpp"
#include "aot/path_measure.hpp"

#include <memory>
#include <string>

namespace aot {

/// Backward-induction value of AW_p^p. V_T = 0; at each earlier stage the
/// value at a prefix pair is the optimal transport of the conditional kernels
/// under the stage cost |x_{t+1} - y_{t+1}|^p + V_{t+1}(children). Stage
/// subproblems at fixed t are independent and run in parallel; entries are
/// written by index so results are bit-stable for any thread count.
double aw_value(const PathMeasure& mu, const PathMeasure& nu, double p,
                Execution ex = Execution::parallel);

struct AwResult {
    double value = 0.0;
    Coupling coupling; // bicausal by construction
};

AwResult aw_p(std::shared_ptr<const PathMeasure> mu, std::shared_ptr<const PathMeasure> nu,
              double p, Execution ex = Execution::parallel);

/// Adapted total variation: the minimum mismatch probability over bicausal
/// couplings, through the absorbing-mismatch recursion (prefixes that differ
/// contribute 1; equal prefixes couple their kernels recursively).
double av(const PathMeasure& mu, const PathMeasure& nu, Execution ex = Execution::parallel);

struct BicausalCheck {
    bool bicausal = true;
    double worst_violation = 0.0;
    std::string worst_site; // direction, time and prefix of the worst violation
};

/// Checks the discrete conditional-independence factorizations in both
/// directions at every time step and positive-mass prefix.
BicausalCheck verify_bicausal(const Coupling& pi, double tol = 1e-7);

/// Flat LP over the bicausal polytope: marginal constraints plus the linear
/// causality equalities in both directions. Test oracle only; refuses
/// instances with more than `pair_cap` path pairs.
double bicausal_lp_oracle(const PathMeasure& mu, const PathMeasure& nu,
                          const CostMatrix& path_cost, std::size_t pair_cap = 400);

} // namespace aot
