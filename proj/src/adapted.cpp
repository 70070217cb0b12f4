#include "aot/adapted.hpp"

#include "aot/dense_simplex.hpp"
#include "aot/errors.hpp"
#include "aot/transport_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace aot {

namespace {

void check_shapes(const PathMeasure& mu, const PathMeasure& nu) {
    if (!mu.same_shape(nu))
        throw ValidationError("dimension-mismatch: measures have d=" + std::to_string(mu.d()) +
                              ",T=" + std::to_string(mu.T()) + " vs d=" +
                              std::to_string(nu.d()) + ",T=" + std::to_string(nu.T()));
}

struct StageProblem {
    std::vector<double> wa, wb;
    CostMatrix cost;
};

/// Kernel-coupling cost at a prefix pair: |x - y|^p plus the value of the
/// child pair (zero at the last stage). The cost matrix is skipped when the
/// 1-D quantile fast path will handle the stage.
StageProblem build_stage(const DisintegrationTree& A, const DisintegrationTree& B,
                         int node_a, int node_b, double p, int T, int t,
                         const std::vector<double>& v_next, std::size_t next_cols,
                         bool need_cost = true) {
    const auto& ca = A.node(node_a).children;
    const auto& cb = B.node(node_b).children;
    const int ka = static_cast<int>(ca.size());
    const int kb = static_cast<int>(cb.size());
    StageProblem sp;
    sp.wa.reserve(ka);
    sp.wb.reserve(kb);
    for (int x : ca) sp.wa.push_back(A.node(x).cond_weight);
    for (int y : cb) sp.wb.push_back(B.node(y).cond_weight);
    if (!need_cost) return sp;
    sp.cost = CostMatrix(ka, kb);
    const int d = A.source().d();
    for (int x = 0; x < ka; ++x) {
        const double* sx = A.step_of(ca[x]);
        for (int y = 0; y < kb; ++y) {
            double c = detail::pow_dist(sx, B.step_of(cb[y]), d, p);
            if (t + 1 < T)
                c += v_next[A.node(ca[x]).local_index * next_cols + B.node(cb[y]).local_index];
            sp.cost.at(x, y) = c;
        }
    }
    return sp;
}

double stage_value(const StageProblem& sp, const DisintegrationTree& A,
                   const DisintegrationTree& B, int node_a, int node_b, int d, int T, int t,
                   double p) {
    // Pure |x-y|^p cost in one dimension: monotone quantile coupling.
    if (d == 1 && t + 1 == T) {
        const auto& ca = A.node(node_a).children;
        const auto& cb = B.node(node_b).children;
        std::vector<double> xs, ys;
        xs.reserve(ca.size());
        ys.reserve(cb.size());
        for (int x : ca) xs.push_back(*A.step_of(x));
        for (int y : cb) ys.push_back(*B.step_of(y));
        double v = wasserstein_1d(xs, sp.wa, ys, sp.wb, p);
        return p == 1.0 ? v : (p == 2.0 ? v * v : std::pow(v, p));
    }
    return detail::transport_simplex(static_cast<int>(sp.wa.size()),
                                     static_cast<int>(sp.wb.size()), sp.wa.data(),
                                     sp.wb.data(), sp.cost.entries.data(), false)
        .cost;
}

/// All stage value tables, depth T-1 down to 0. tables[t] has
/// |A_t| * |B_t| entries in local-index order.
std::vector<std::vector<double>> build_value_tables(const DisintegrationTree& A,
                                                    const DisintegrationTree& B, double p,
                                                    Execution ex) {
    const int T = A.source().T();
    const int d = A.source().d();
    std::vector<std::vector<double>> tables(T);
    std::vector<double> empty;
    for (int t = T - 1; t >= 0; --t) {
        const auto& la = A.at_depth(t);
        const auto& lb = B.at_depth(t);
        const std::vector<double>& v_next = (t + 1 < T) ? tables[t + 1] : empty;
        const std::size_t next_cols = (t + 1 < T) ? B.at_depth(t + 1).size() : 0;
        std::vector<double>& v = tables[t];
        v.assign(la.size() * lb.size(), 0.0);
        const bool fast_1d = (d == 1 && t + 1 == T);
        parallel_for(v.size(), ex, [&](std::size_t idx) {
            const int ai = static_cast<int>(idx / lb.size());
            const int bi = static_cast<int>(idx % lb.size());
            StageProblem sp =
                build_stage(A, B, la[ai], lb[bi], p, T, t, v_next, next_cols, !fast_1d);
            v[idx] = stage_value(sp, A, B, la[ai], lb[bi], d, T, t, p);
        });
    }
    return tables;
}

TransportPlan stage_plan(const StageProblem& sp, const DisintegrationTree& A,
                         const DisintegrationTree& B, int node_a, int node_b, int d, int T,
                         int t) {
    if (d == 1 && t + 1 == T) {
        // monotone pairing, optimal for any convex |.|^p
        const auto& ca = A.node(node_a).children;
        const auto& cb = B.node(node_b).children;
        const int ka = static_cast<int>(ca.size());
        const int kb = static_cast<int>(cb.size());
        std::vector<int> ox(ka), oy(kb);
        for (int i = 0; i < ka; ++i) ox[i] = i;
        for (int j = 0; j < kb; ++j) oy[j] = j;
        std::sort(ox.begin(), ox.end(),
                  [&](int u, int w) { return *A.step_of(ca[u]) < *A.step_of(ca[w]); });
        std::sort(oy.begin(), oy.end(),
                  [&](int u, int w) { return *B.step_of(cb[u]) < *B.step_of(cb[w]); });
        TransportPlan plan;
        int i = 0, j = 0;
        double ra = sp.wa[ox[0]], rb = sp.wb[oy[0]];
        while (true) {
            double f = std::min(ra, rb);
            if (f > 0.0) {
                plan.entries.push_back({ox[i], oy[j], f});
                plan.objective += f * sp.cost.at(ox[i], oy[j]);
            }
            ra -= f;
            rb -= f;
            if (ra <= 1e-15) {
                if (++i >= ka) break;
                ra = sp.wa[ox[i]];
            }
            if (rb <= 1e-15) {
                if (++j >= kb) break;
                rb = sp.wb[oy[j]];
            }
        }
        return plan;
    }
    return min_cost_transport(sp.wa, sp.wb, sp.cost, true);
}

} // namespace

double aw_value(const PathMeasure& mu, const PathMeasure& nu, double p, Execution ex) {
    check_shapes(mu, nu);
    if (!(p >= 1.0)) throw ValidationError("invalid-measure: p must be >= 1");
    DisintegrationTree A = disintegrate(mu);
    DisintegrationTree B = disintegrate(nu);
    auto tables = build_value_tables(A, B, p, ex);
    return std::pow(tables[0][0], 1.0 / p);
}

AwResult aw_p(std::shared_ptr<const PathMeasure> mu, std::shared_ptr<const PathMeasure> nu,
              double p, Execution ex) {
    check_shapes(*mu, *nu);
    if (!(p >= 1.0)) throw ValidationError("invalid-measure: p must be >= 1");
    const int T = mu->T();
    const int d = mu->d();
    DisintegrationTree A = disintegrate(mu);
    DisintegrationTree B = disintegrate(nu);
    auto tables = build_value_tables(A, B, p, ex);

    // Compose stage-optimal plans top-down. A child pair has a unique parent
    // pair, so each visited pair is expanded exactly once.
    std::vector<double> empty;
    std::map<std::pair<int, int>, double> level{{{A.root(), B.root()}, 1.0}};
    for (int t = 0; t < T; ++t) {
        const std::vector<double>& v_next = (t + 1 < T) ? tables[t + 1] : empty;
        const std::size_t next_cols = (t + 1 < T) ? B.at_depth(t + 1).size() : 0;
        std::map<std::pair<int, int>, double> next;
        for (const auto& [pair, mass] : level) {
            StageProblem sp =
                build_stage(A, B, pair.first, pair.second, p, T, t, v_next, next_cols);
            TransportPlan plan = stage_plan(sp, A, B, pair.first, pair.second, d, T, t);
            const auto& ca = A.node(pair.first).children;
            const auto& cb = B.node(pair.second).children;
            for (const auto& e : plan.entries)
                next[{ca[e.i], cb[e.j]}] += mass * e.mass;
        }
        level = std::move(next);
    }

    std::vector<Coupling::Entry> entries;
    entries.reserve(level.size());
    for (const auto& [pair, mass] : level)
        if (mass > 1e-15)
            entries.push_back({A.atom_of_leaf(pair.first), B.atom_of_leaf(pair.second), mass});
    AwResult out{std::pow(tables[0][0], 1.0 / p),
                 Coupling(std::move(mu), std::move(nu), std::move(entries))};
    return out;
}

double av(const PathMeasure& mu, const PathMeasure& nu, Execution ex) {
    check_shapes(mu, nu);
    const int T = mu.T();
    const int d = mu.d();
    DisintegrationTree A = disintegrate(mu);
    DisintegrationTree B = disintegrate(nu);

    auto steps_equal = [&](int na, int nb) {
        const double* sa = A.step_of(na);
        const double* sb = B.step_of(nb);
        for (int c = 0; c < d; ++c)
            if (sa[c] != sb[c]) return false;
        return true;
    };

    // Only pairs with identical prefixes recurse; everything else is an
    // absorbed mismatch with value 1. Matched pairs per depth are found by
    // merging the (sorted) child lists.
    std::vector<std::vector<std::pair<int, int>>> matched(T + 1);
    matched[0].push_back({A.root(), B.root()});
    for (int t = 0; t < T; ++t) {
        for (const auto& [na, nb] : matched[t]) {
            const auto& ca = A.node(na).children;
            const auto& cb = B.node(nb).children;
            std::size_t i = 0, j = 0;
            auto lex_less = [d](const double* sa, const double* sb) {
                return std::lexicographical_compare(sa, sa + d, sb, sb + d);
            };
            while (i < ca.size() && j < cb.size()) {
                const double* sa = A.step_of(ca[i]);
                const double* sb = B.step_of(cb[j]);
                if (lex_less(sa, sb))
                    ++i;
                else if (lex_less(sb, sa))
                    ++j;
                else
                    matched[t + 1].push_back({ca[i++], cb[j++]});
            }
        }
    }

    std::vector<std::map<std::pair<int, int>, double>> value(T + 1);
    for (const auto& pr : matched[T]) value[T][pr] = 0.0;
    for (int t = T - 1; t >= 0; --t) {
        auto& level = value[t];
        for (const auto& pr : matched[t]) level[pr] = 0.0;
        std::vector<std::pair<int, int>> keys = matched[t];
        std::vector<double> results(keys.size(), 0.0);
        parallel_for(keys.size(), ex, [&](std::size_t k) {
            const auto [na, nb] = keys[k];
            const auto& ca = A.node(na).children;
            const auto& cb = B.node(nb).children;
            const int ka = static_cast<int>(ca.size());
            const int kb = static_cast<int>(cb.size());
            std::vector<double> wa, wb;
            wa.reserve(ka);
            wb.reserve(kb);
            for (int x : ca) wa.push_back(A.node(x).cond_weight);
            for (int y : cb) wb.push_back(B.node(y).cond_weight);
            CostMatrix cost(ka, kb);
            for (int x = 0; x < ka; ++x)
                for (int y = 0; y < kb; ++y) {
                    if (!steps_equal(ca[x], cb[y])) {
                        cost.at(x, y) = 1.0;
                    } else {
                        auto it = value[t + 1].find({ca[x], cb[y]});
                        cost.at(x, y) = it == value[t + 1].end() ? 1.0 : it->second;
                    }
                }
            results[k] = detail::transport_simplex(ka, kb, wa.data(), wb.data(),
                                                   cost.entries.data(), false)
                             .cost;
        });
        for (std::size_t k = 0; k < keys.size(); ++k) level[keys[k]] = results[k];
    }
    if (value[0].empty()) return 1.0;
    return std::min(1.0, value[0].begin()->second);
}

BicausalCheck verify_bicausal(const Coupling& pi, double tol) {
    BicausalCheck out;
    const PathMeasure& L = pi.left();
    const PathMeasure& R = pi.right();
    const int T = L.T();
    DisintegrationTree tl = disintegrate(pi.left_ptr());
    DisintegrationTree tr = disintegrate(pi.right_ptr());

    auto describe = [](const PathMeasure& m, const DisintegrationTree& tree, int node) {
        const auto& n = tree.node(node);
        std::string s = "(";
        const double* pfx = tree.prefix_of(node);
        for (int c = 0; c < n.depth * m.d(); ++c) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%g", pfx[c]);
            if (c) s += ",";
            s += buf;
        }
        return s + ")";
    };

    // Direction dir = 0: conditioning on the left prefix, checking that the
    // right prefix and the left future factorize. dir = 1 swaps roles.
    for (int dir = 0; dir < 2; ++dir) {
        const DisintegrationTree& cond = dir == 0 ? tl : tr;
        const DisintegrationTree& other = dir == 0 ? tr : tl;
        const PathMeasure& cm = dir == 0 ? L : R;
        for (int t = 1; t < T; ++t) {
            // joint mass of (conditioning-side full atom, other-side prefix)
            std::map<std::pair<std::size_t, int>, double> joint;
            std::map<std::pair<int, int>, double> prefix_joint; // (cond node, other node)
            for (const auto& e : pi.entries()) {
                std::size_t ci = dir == 0 ? e.left : e.right;
                std::size_t oi = dir == 0 ? e.right : e.left;
                int onode = other.node_of_atom_at(oi, t);
                joint[{ci, onode}] += e.weight;
                prefix_joint[{cond.node_of_atom_at(ci, t), onode}] += e.weight;
            }
            for (const auto& [key, mass_ab] : prefix_joint) {
                const int a = key.first;
                const int b = key.second;
                const double pa = cond.node(a).mass;
                // every atom under prefix a, including those the joint never hits
                for (std::size_t ci = 0; ci < cm.size(); ++ci) {
                    if (cond.node_of_atom_at(ci, t) != a) continue;
                    auto it = joint.find({ci, b});
                    double lhs = (it == joint.end() ? 0.0 : it->second) / pa;
                    double rhs = (cm.atom(ci).weight / pa) * (mass_ab / pa);
                    double viol = std::fabs(lhs - rhs);
                    if (viol > out.worst_violation) {
                        out.worst_violation = viol;
                        out.worst_site = std::string(dir == 0 ? "X" : "Y") +
                                         "-conditioning, t=" + std::to_string(t) +
                                         ", prefix=" + describe(cm, cond, a) +
                                         " vs " + describe(dir == 0 ? R : L, other, b);
                    }
                }
            }
        }
    }
    out.bicausal = out.worst_violation <= tol;
    return out;
}

double bicausal_lp_oracle(const PathMeasure& mu, const PathMeasure& nu,
                          const CostMatrix& path_cost, std::size_t pair_cap) {
    check_shapes(mu, nu);
    const int n = static_cast<int>(mu.size());
    const int m = static_cast<int>(nu.size());
    if (static_cast<std::size_t>(n) * m > pair_cap)
        throw ValidationError("invalid-measure: bicausal LP oracle refuses " +
                              std::to_string(static_cast<std::size_t>(n) * m) +
                              " path pairs (cap " + std::to_string(pair_cap) + ")");
    if (path_cost.rows != n || path_cost.cols != m)
        throw ValidationError("invalid-cost: oracle cost shape mismatch");
    const int T = mu.T();
    DisintegrationTree A = disintegrate(mu);
    DisintegrationTree B = disintegrate(nu);

    detail::LinearProgram lp;
    lp.num_vars = n * m;
    lp.objective.assign(lp.num_vars, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) lp.objective[i * m + j] = path_cost.at(i, j);

    for (int i = 0; i < n; ++i) {
        std::vector<double> row(lp.num_vars, 0.0);
        for (int j = 0; j < m; ++j) row[i * m + j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(mu.atom(i).weight);
        lp.kind.push_back('E');
    }
    for (int j = 0; j < m; ++j) {
        std::vector<double> row(lp.num_vars, 0.0);
        for (int i = 0; i < n; ++i) row[i * m + j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(nu.atom(j).weight);
        lp.kind.push_back('E');
    }

    // Causality in both directions: with fixed marginals the conditional
    // independence factorization is linear in pi. For a conditioning-side
    // prefix class a, full atom i0 in a, and other-side prefix class b:
    //   mass(a) * pi(i0, b) = w_{i0} * pi(a, b).
    auto add_causality = [&](const DisintegrationTree& cond, const DisintegrationTree& other,
                             const PathMeasure& cmeas, bool cond_is_left) {
        const int cn = static_cast<int>(cmeas.size());
        const int on = cond_is_left ? m : n;
        for (int t = 1; t < T; ++t) {
            std::map<int, std::vector<int>> classes; // cond node -> atom list
            for (int i = 0; i < cn; ++i)
                classes[cond.node_of_atom_at(static_cast<std::size_t>(i), t)].push_back(i);
            std::map<int, std::vector<int>> oclasses;
            for (int j = 0; j < on; ++j)
                oclasses[other.node_of_atom_at(static_cast<std::size_t>(j), t)].push_back(j);
            for (const auto& [a, members] : classes) {
                if (members.size() < 2) continue; // singleton classes are trivial
                const double pa = cond.node(a).mass;
                for (const auto& [b, omembers] : oclasses) {
                    for (int i0 : members) {
                        std::vector<double> row(lp.num_vars, 0.0);
                        const double wi0 = cmeas.atom(static_cast<std::size_t>(i0)).weight;
                        for (int j : omembers) {
                            int idx = cond_is_left ? i0 * m + j : j * m + i0;
                            row[idx] += pa;
                        }
                        for (int i : members)
                            for (int j : omembers) {
                                int idx = cond_is_left ? i * m + j : j * m + i;
                                row[idx] -= wi0;
                            }
                        lp.rows.push_back(std::move(row));
                        lp.rhs.push_back(0.0);
                        lp.kind.push_back('E');
                    }
                }
            }
        }
    };
    add_causality(A, B, mu, true);
    add_causality(B, A, nu, false);

    auto sol = detail::solve_lp(lp);
    if (!sol.feasible)
        throw NumericError("numeric: bicausal LP reported infeasible (should not happen)");
    return sol.objective;
}

} // namespace aot
