#include "aot/transport_simplex.hpp"

#include "aot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aot::detail {

namespace {

struct Basis {
    std::vector<int> bi, bj;
    std::vector<double> flow;
    std::size_t size() const { return bi.size(); }
};

} // namespace

TransportSolution transport_simplex(int n, int m, const double* supply,
                                    const double* demand, const double* cost,
                                    bool need_plan, Execution ex) {
    TransportSolution out;
    auto C = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * m + j]; };

    if (n == 1) {
        for (int j = 0; j < m; ++j) {
            out.cost += demand[j] * C(0, j);
            if (need_plan && demand[j] > 0.0) out.plan.push_back({0, j, demand[j]});
        }
        return out;
    }
    if (m == 1) {
        for (int i = 0; i < n; ++i) {
            out.cost += supply[i] * C(i, 0);
            if (need_plan && supply[i] > 0.0) out.plan.push_back({i, 0, supply[i]});
        }
        return out;
    }

    double max_c = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(n) * m; ++k)
        max_c = std::max(max_c, std::fabs(cost[k]));
    const double tol = 1e-11 * (1.0 + max_c);

    // Northwest-corner start: exactly n+m-1 basic cells, already a tree.
    Basis basis;
    basis.bi.reserve(n + m - 1);
    {
        std::vector<double> ar(supply, supply + n), bc(demand, demand + m);
        int i = 0, j = 0;
        while (true) {
            double f = std::min(ar[i], bc[j]);
            if (f < 0.0) f = 0.0;
            basis.bi.push_back(i);
            basis.bj.push_back(j);
            basis.flow.push_back(f);
            ar[i] -= f;
            bc[j] -= f;
            if (i == n - 1 && j == m - 1) break;
            if (i < n - 1 && (ar[i] <= 1e-15 || j == m - 1))
                ++i;
            else
                ++j;
        }
    }

    std::vector<double> u(n), v(m);
    std::vector<std::vector<int>> row_adj(n), col_adj(m);
    std::vector<int> stack, parent_edge(n + m), order;
    std::vector<char> seen(n + m);
    std::vector<double> row_best(n);
    std::vector<int> row_arg(n);

    const long bland_after = 40L * (n + m);
    const long hard_cap = 4000L * (n + m) + 200000L;
    long pivots = 0;

    while (true) {
        row_adj.assign(n, {});
        col_adj.assign(m, {});
        for (std::size_t k = 0; k < basis.size(); ++k) {
            row_adj[basis.bi[k]].push_back(static_cast<int>(k));
            col_adj[basis.bj[k]].push_back(static_cast<int>(k));
        }

        // Duals by BFS over the basis tree (nodes: rows 0..n-1, cols n..n+m-1).
        std::fill(seen.begin(), seen.end(), 0);
        u[0] = 0.0;
        seen[0] = 1;
        stack.assign(1, 0);
        while (!stack.empty()) {
            int node = stack.back();
            stack.pop_back();
            if (node < n) {
                for (int k : row_adj[node]) {
                    int cn = n + basis.bj[k];
                    if (!seen[cn]) {
                        v[basis.bj[k]] = C(node, basis.bj[k]) - u[node];
                        seen[cn] = 1;
                        stack.push_back(cn);
                    }
                }
            } else {
                int j = node - n;
                for (int k : col_adj[j]) {
                    int rn = basis.bi[k];
                    if (!seen[rn]) {
                        u[rn] = C(rn, j) - v[j];
                        seen[rn] = 1;
                        stack.push_back(rn);
                    }
                }
            }
        }

        // Entering arc. Most-negative reduced cost with lexicographic
        // tie-breaks; after too many degenerate pivots, first-negative in
        // lexicographic order (Bland) which cannot cycle.
        int ei = -1, ej = -1;
        if (pivots < bland_after) {
            parallel_for(static_cast<std::size_t>(n), ex, [&](std::size_t ii) {
                int i = static_cast<int>(ii);
                double best = -tol;
                int arg = -1;
                const double* crow = cost + static_cast<std::size_t>(i) * m;
                for (int j = 0; j < m; ++j) {
                    double r = crow[j] - u[i] - v[j];
                    if (r < best) {
                        best = r;
                        arg = j;
                    }
                }
                row_best[i] = best;
                row_arg[i] = arg;
            });
            double best = -tol;
            for (int i = 0; i < n; ++i) {
                if (row_arg[i] >= 0 && row_best[i] < best) {
                    best = row_best[i];
                    ei = i;
                    ej = row_arg[i];
                }
            }
        } else {
            for (int i = 0; i < n && ei < 0; ++i)
                for (int j = 0; j < m; ++j)
                    if (C(i, j) - u[i] - v[j] < -tol) {
                        ei = i;
                        ej = j;
                        break;
                    }
        }
        if (ei < 0) break; // optimal

        // Unique tree path from row ei to col ej.
        std::fill(seen.begin(), seen.end(), 0);
        seen[ei] = 1;
        parent_edge[ei] = -1;
        stack.assign(1, ei);
        while (!stack.empty()) {
            int node = stack.back();
            stack.pop_back();
            if (node == n + ej) break;
            if (node < n) {
                for (int k : row_adj[node]) {
                    int cn = n + basis.bj[k];
                    if (!seen[cn]) {
                        seen[cn] = 1;
                        parent_edge[cn] = k;
                        stack.push_back(cn);
                    }
                }
            } else {
                for (int k : col_adj[node - n]) {
                    int rn = basis.bi[k];
                    if (!seen[rn]) {
                        seen[rn] = 1;
                        parent_edge[rn] = k;
                        stack.push_back(rn);
                    }
                }
            }
        }
        order.clear(); // path edges, col ej back to row ei
        for (int node = n + ej; node != ei;) {
            int k = parent_edge[node];
            order.push_back(k);
            int other_row = basis.bi[k], other_col = n + basis.bj[k];
            node = (node == other_col) ? other_row : other_col;
        }
        // Edges at odd positions counted from the row-ei end carry -theta;
        // `order` is reversed, so flip parity from the back.
        const std::size_t plen = order.size();
        double theta = -1.0;
        int leave = -1;
        for (std::size_t s = 0; s < plen; ++s) {
            bool minus = ((plen - s) % 2) == 1;
            if (!minus) continue;
            int k = order[s];
            double f = basis.flow[k];
            if (leave < 0 || f < theta - 1e-15 ||
                (f < theta + 1e-15 &&
                 (basis.bi[k] < basis.bi[leave] ||
                  (basis.bi[k] == basis.bi[leave] && basis.bj[k] < basis.bj[leave])))) {
                theta = f;
                leave = k;
            }
        }
        if (leave < 0)
            throw NumericError("numeric: transport simplex lost the basis tree");
        if (theta < 0.0) theta = 0.0;
        for (std::size_t s = 0; s < plen; ++s) {
            bool minus = ((plen - s) % 2) == 1;
            basis.flow[order[s]] += minus ? -theta : theta;
            if (basis.flow[order[s]] < 0.0) basis.flow[order[s]] = 0.0;
        }
        basis.bi[leave] = ei;
        basis.bj[leave] = ej;
        basis.flow[leave] = theta;

        if (++pivots > hard_cap)
            throw NumericError("numeric: transport simplex exceeded " +
                               std::to_string(hard_cap) + " pivots (n=" +
                               std::to_string(n) + ", m=" + std::to_string(m) + ")");
    }

    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (basis.flow[k] <= 0.0) continue;
        out.cost += basis.flow[k] * C(basis.bi[k], basis.bj[k]);
        if (need_plan) out.plan.push_back({basis.bi[k], basis.bj[k], basis.flow[k]});
    }
    if (need_plan)
        std::sort(out.plan.begin(), out.plan.end(), [](const FlowEntry& a, const FlowEntry& b) {
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        });
    return out;
}

} // namespace aot::detail
