#include "aot/dense_simplex.hpp"

#include "aot/errors.hpp"

#include <cmath>
#include <string>

namespace aot::detail {

namespace {

class Tableau {
public:
    Tableau(int m, int n) : m_(m), n_(n), a_(static_cast<std::size_t>(m) * (n + 1), 0.0),
                            cost_(n + 1, 0.0), basis_(m, -1) {}

    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }
    double& rhs(int i) { return at(i, n_); }
    double& cost(int j) { return cost_[j]; }
    int& basis(int i) { return basis_[i]; }

    void pivot(int r, int c) {
        double piv = at(r, c);
        for (int j = 0; j <= n_; ++j) at(r, j) /= piv;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            double f = at(i, c);
            if (f == 0.0) continue;
            for (int j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
            at(i, c) = 0.0;
        }
        double f = cost_[c];
        if (f != 0.0) {
            for (int j = 0; j <= n_; ++j) cost_[j] -= f * at(r, j);
            cost_[c] = 0.0;
        }
        basis_[r] = c;
    }

    /// Bland's rule loop over the column range [0, limit).
    void iterate(int limit, double tol, long max_iters) {
        long iters = 0;
        while (true) {
            int enter = -1;
            for (int j = 0; j < limit; ++j) {
                if (cost_[j] < -tol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return;
            int leave = -1;
            double best = 0.0;
            for (int i = 0; i < m_; ++i) {
                double aij = at(i, enter);
                if (aij <= tol) continue;
                double ratio = rhs(i) / aij;
                if (leave < 0 || ratio < best - 1e-14 ||
                    (ratio < best + 1e-14 && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0)
                throw NumericError("numeric: LP unbounded (column " + std::to_string(enter) + ")");
            pivot(leave, enter);
            if (++iters > max_iters)
                throw NumericError("numeric: LP exceeded " + std::to_string(max_iters) +
                                   " pivots (m=" + std::to_string(m_) +
                                   ", n=" + std::to_string(n_) + ")");
        }
    }

    int m() const { return m_; }
    int n() const { return n_; }

private:
    int m_, n_;
    std::vector<double> a_;
    std::vector<double> cost_;
    std::vector<int> basis_;
};

} // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const int m = static_cast<int>(lp.rows.size());
    const int nv = lp.num_vars;
    int num_slack = 0;
    for (char k : lp.kind)
        if (k == 'L') ++num_slack;
    const int n_struct = nv + num_slack;
    const int n_total = n_struct + m; // + artificials
    Tableau tab(m, n_total);

    const double tol = 1e-10;

    // equilibrate: scale every row to unit max magnitude so feasibility
    // tolerances are meaningful regardless of input units
    int slack = 0;
    for (int i = 0; i < m; ++i) {
        double mag = std::fabs(lp.rhs[i]);
        for (double v : lp.rows[i]) mag = std::max(mag, std::fabs(v));
        if (mag == 0.0) mag = 1.0;
        double sign_only = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
        double sign = sign_only / mag;
        for (int j = 0; j < nv; ++j) tab.at(i, j) = sign * lp.rows[i][j];
        if (lp.kind[i] == 'L') {
            tab.at(i, nv + slack) = sign_only; // slack rescaled to row units
            ++slack;
        }
        tab.at(i, n_struct + i) = 1.0; // artificial
        tab.rhs(i) = sign * lp.rhs[i];
        tab.basis(i) = n_struct + i;
    }

    // Phase 1: minimize the artificial total.
    for (int j = 0; j <= n_total; ++j) {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
            s += (j == n_total) ? tab.rhs(i) : tab.at(i, j);
        if (j < n_struct)
            tab.cost(j) = -s;
        else if (j == n_total)
            tab.cost(n_total) = -s;
        else
            tab.cost(j) = 0.0;
    }
    const long cap = 20000 + 200L * (m + n_total);
    tab.iterate(n_struct, tol, cap);
    double art_total = -tab.cost(n_total);
    if (art_total > 1e-7) {
        LpSolution out;
        out.feasible = false;
        return out;
    }
    // Drive out artificials still basic; rows without eligible pivots are
    // redundant and stay inert.
    for (int i = 0; i < m; ++i) {
        if (tab.basis(i) < n_struct) continue;
        for (int j = 0; j < n_struct; ++j) {
            if (std::fabs(tab.at(i, j)) > tol) {
                tab.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2.
    for (int j = 0; j <= n_total; ++j) tab.cost(j) = 0.0;
    for (int j = 0; j < nv; ++j) tab.cost(j) = lp.objective[j];
    for (int i = 0; i < m; ++i) {
        int b = tab.basis(i);
        if (b >= nv) continue;
        double f = tab.cost(b);
        if (f == 0.0) continue;
        for (int j = 0; j <= n_total; ++j) tab.cost(j) -= f * tab.at(i, j);
        tab.cost(b) = 0.0;
    }
    tab.iterate(n_struct, tol, cap);

    LpSolution out;
    out.feasible = true;
    out.x.assign(nv, 0.0);
    for (int i = 0; i < m; ++i) {
        int b = tab.basis(i);
        if (b < nv) out.x[b] = std::max(0.0, tab.rhs(i));
    }
    out.objective = 0.0;
    for (int j = 0; j < nv; ++j) out.objective += lp.objective[j] * out.x[j];
    return out;
}

} // namespace aot::detail
