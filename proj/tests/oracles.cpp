#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracles {

namespace {

double pow_dist(const std::vector<double>& a, const std::vector<double>& b, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::pow(std::sqrt(s), p);
}

} // namespace

double permutation_wp_power(const std::vector<std::vector<double>>& x,
                            const std::vector<std::vector<double>>& y, double p) {
    const std::size_t n = x.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += pow_dist(x[i], y[perm[i]], p);
        best = std::min(best, c / n);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

namespace {

// Solve the marginal equations restricted to a candidate basis (set of
// cells). Returns false when the basis is singular or infeasible.
bool solve_basis(const std::vector<double>& a, const std::vector<double>& b,
                 const std::vector<int>& cells, int m, std::vector<double>& flow) {
    const int n = static_cast<int>(a.size());
    const int mm = static_cast<int>(b.size());
    const int k = static_cast<int>(cells.size()); // n + m - 1
    // rows: n row-sum equations and mm-1 column-sum equations
    const int rows = n + mm - 1;
    std::vector<std::vector<double>> A(rows, std::vector<double>(k + 1, 0.0));
    for (int c = 0; c < k; ++c) {
        int i = cells[c] / m, j = cells[c] % m;
        A[i][c] = 1.0;
        if (j < mm - 1) A[n + j][c] = 1.0;
    }
    for (int i = 0; i < n; ++i) A[i][k] = a[i];
    for (int j = 0; j < mm - 1; ++j) A[n + j][k] = b[j];
    // Gaussian elimination with partial pivoting
    int rank = 0;
    std::vector<int> pivot_col(rows, -1);
    for (int col = 0; col < k && rank < rows; ++col) {
        int piv = -1;
        double best = 1e-10;
        for (int r = rank; r < rows; ++r)
            if (std::fabs(A[r][col]) > best) {
                best = std::fabs(A[r][col]);
                piv = r;
            }
        if (piv < 0) continue;
        std::swap(A[rank], A[piv]);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || A[r][col] == 0.0) continue;
            double f = A[r][col] / A[rank][col];
            for (int cc = col; cc <= k; ++cc) A[r][cc] -= f * A[rank][cc];
        }
        pivot_col[rank] = col;
        ++rank;
    }
    if (rank < rows) return false; // singular (not a spanning basis)
    flow.assign(k, 0.0);
    for (int r = 0; r < rows; ++r) flow[pivot_col[r]] = A[r][k] / A[r][pivot_col[r]];
    for (double f : flow)
        if (f < -1e-9) return false;
    return true;
}

} // namespace

double envelope_constrained_max(const std::vector<double>& a, const std::vector<double>& b,
                                const aot::CostMatrix& gain, const aot::CostMatrix& cost,
                                double budget) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    const int cells = n * m;
    const int k = n + m - 1;
    std::vector<std::pair<double, double>> vertices; // (cost, gain)
    std::vector<int> pick(k);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            std::vector<double> flow;
            if (!solve_basis(a, b, pick, m, flow)) return;
            double c = 0.0, g = 0.0;
            for (int idx = 0; idx < k; ++idx) {
                int i = pick[idx] / m, j = pick[idx] % m;
                c += flow[idx] * cost.at(i, j);
                g += flow[idx] * gain.at(i, j);
            }
            vertices.push_back({c, g});
            return;
        }
        for (int c = start; c < cells; ++c) {
            pick[depth] = c;
            rec(c + 1, depth + 1);
        }
    };
    rec(0, 0);

    double best = -1e300;
    for (const auto& [c, g] : vertices)
        if (c <= budget + 1e-9) best = std::max(best, g);
    for (const auto& [c1, g1] : vertices)
        for (const auto& [c2, g2] : vertices) {
            if (!(c1 < budget && budget < c2)) continue;
            double t = (budget - c2) / (c1 - c2);
            best = std::max(best, t * g1 + (1.0 - t) * g2);
        }
    return best;
}

double quantile_wp(std::vector<double> x, std::vector<double> wx, std::vector<double> y,
                   std::vector<double> wy, double p) {
    std::vector<std::size_t> ox(x.size()), oy(y.size());
    std::iota(ox.begin(), ox.end(), 0);
    std::iota(oy.begin(), oy.end(), 0);
    std::sort(ox.begin(), ox.end(), [&](std::size_t u, std::size_t v) { return x[u] < x[v]; });
    std::sort(oy.begin(), oy.end(), [&](std::size_t u, std::size_t v) { return y[u] < y[v]; });
    double cost = 0.0;
    std::size_t i = 0, j = 0;
    double ra = wx[ox[0]], rb = wy[oy[0]];
    while (i < ox.size() && j < oy.size()) {
        double f = std::min(ra, rb);
        cost += f * std::pow(std::fabs(x[ox[i]] - y[oy[j]]), p);
        ra -= f;
        rb -= f;
        if (ra <= 1e-15) {
            ++i;
            if (i < ox.size()) ra = wx[ox[i]];
        }
        if (rb <= 1e-15) {
            ++j;
            if (j < oy.size()) rb = wy[oy[j]];
        }
    }
    return std::pow(cost, 1.0 / p);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double Mixture::cdf(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < means.size(); ++k)
        s += weights[k] * normal_cdf((x - means[k]) / sigma);
    return s;
}

double simpson(const std::function<double(double)>& f, double lo, double hi, int intervals) {
    if (intervals % 2) ++intervals;
    double h = (hi - lo) / intervals;
    double s = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double w1_step_vs_cdf(const std::vector<double>& atoms, const std::vector<double>& weights,
                      const std::function<double(double)>& cdf, double lo, double hi) {
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t u, std::size_t v) { return atoms[u] < atoms[v]; });
    double total = 0.0;
    double level = 0.0;
    double x = lo;
    for (std::size_t k = 0; k < order.size(); ++k) {
        double nx = atoms[order[k]];
        if (nx > x)
            total += simpson([&](double t) { return std::fabs(cdf(t) - level); }, x, nx, 800);
        level += weights[order[k]];
        x = std::max(x, nx);
    }
    if (hi > x)
        total += simpson([&](double t) { return std::fabs(cdf(t) - level); }, x, hi, 800);
    return total;
}

} // namespace oracles
