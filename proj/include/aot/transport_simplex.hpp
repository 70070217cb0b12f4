#pragma once

#include "aot/parallel.hpp"

#include <vector>

namespace aot::detail {

struct FlowEntry {
    int i = 0;
    int j = 0;
    double mass = 0.0;
};

struct TransportSolution {
    double cost = 0.0;
    std::vector<FlowEntry> plan; // positive-mass entries of an optimal vertex
};

/// Exact transportation simplex on a dense cost matrix (row-major n x m).
/// Supplies and demands must have equal totals. Deterministic: most-negative
/// entering with lexicographic tie-breaks, switching to a Bland scan if the
/// pivot count degenerates. The reduced-cost scan is the OpenMP kernel; the
/// serial path is the reference implementation.
TransportSolution transport_simplex(int n, int m, const double* supply,
                                    const double* demand, const double* cost,
                                    bool need_plan, Execution ex = Execution::serial);

} // namespace aot::detail
