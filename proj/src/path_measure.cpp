#include "aot/path_measure.hpp"

#include "aot/errors.hpp"
#include "aot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace aot {

namespace {

bool path_less(const Atom& a, const Atom& b) {
    return std::lexicographical_compare(a.path.begin(), a.path.end(),
                                        b.path.begin(), b.path.end());
}

bool path_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a == b; // exact floating-point equality, fuzzy callers quantize first
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

PathMeasure::PathMeasure(int d, int num_steps, std::vector<Atom> atoms)
    : d_(d), T_(num_steps) {
    if (d_ < 1 || T_ < 1)
        throw ValidationError("invalid-measure: d and T must be positive, got d=" +
                              std::to_string(d_) + " T=" + std::to_string(T_));
    if (atoms.empty())
        throw ValidationError("invalid-measure: measure has no atoms");
    const std::size_t len = static_cast<std::size_t>(d_) * T_;
    double total = 0.0;
    for (const auto& a : atoms) {
        if (a.path.size() != len)
            throw ValidationError("invalid-measure: atom path has " +
                                  std::to_string(a.path.size()) + " entries, expected " +
                                  std::to_string(len));
        for (double x : a.path)
            if (!std::isfinite(x))
                throw ValidationError("invalid-measure: non-finite path entry " + fmt(x));
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw ValidationError("invalid-measure: non-positive weight " + fmt(a.weight));
        total += a.weight;
    }
    if (std::fabs(total - 1.0) > kWeightTol)
        throw ValidationError("invalid-measure: weights sum to " + fmt(total) +
                              " (deficit " + fmt(1.0 - total) + ")");
    std::sort(atoms.begin(), atoms.end(), path_less);
    atoms_.reserve(atoms.size());
    for (auto& a : atoms) {
        if (!atoms_.empty() && path_equal(atoms_.back().path, a.path))
            atoms_.back().weight += a.weight; // merge duplicates
        else
            atoms_.push_back(std::move(a));
    }
}

double PathMeasure::path_norm(std::size_t i) const {
    double s = 0.0;
    for (double x : atoms_[i].path) s += x * x;
    return std::sqrt(s);
}

// ---- disintegration --------------------------------------------------------

DisintegrationTree::DisintegrationTree(std::shared_ptr<const PathMeasure> source)
    : source_(std::move(source)) {
    const PathMeasure& mu = *source_;
    const int d = mu.d(), T = mu.T();
    depth_index_.resize(T + 1);
    leaf_of_atom_.resize(mu.size(), -1);

    Node root;
    root.mass = 1.0;
    root.cond_weight = 1.0;
    nodes_.push_back(root);
    depth_index_[0].push_back(0);

    // Atoms are sorted lexicographically, so the atoms under a prefix form a
    // contiguous run; children appear in step order automatically.
    struct Range {
        int node;
        std::size_t lo, hi; // atom range [lo, hi)
    };
    std::vector<Range> frontier{{0, 0, mu.size()}};
    for (int t = 0; t < T; ++t) {
        std::vector<Range> next;
        for (const auto& r : frontier) {
            std::size_t i = r.lo;
            while (i < r.hi) {
                std::size_t j = i + 1;
                while (j < r.hi) {
                    bool same = true;
                    for (int c = 0; c < d && same; ++c)
                        same = mu.coord(j, t, c) == mu.coord(i, t, c);
                    if (!same) break;
                    ++j;
                }
                Node child;
                child.parent = r.node;
                child.depth = t + 1;
                child.rep_atom = static_cast<int>(i);
                for (std::size_t k = i; k < j; ++k) child.mass += mu.atom(k).weight;
                child.cond_weight = child.mass / nodes_[r.node].mass;
                child.local_index = static_cast<int>(depth_index_[t + 1].size());
                int id = static_cast<int>(nodes_.size());
                nodes_.push_back(child);
                nodes_[r.node].children.push_back(id);
                depth_index_[t + 1].push_back(id);
                if (t + 1 == T) {
                    for (std::size_t k = i; k < j; ++k)
                        leaf_of_atom_[k] = id;
                } else {
                    next.push_back({id, i, j});
                }
                i = j;
            }
        }
        frontier = std::move(next);
    }
}

int DisintegrationTree::node_of_atom_at(std::size_t i, int depth) const {
    int id = leaf_of_atom_[i];
    while (nodes_[id].depth > depth) id = nodes_[id].parent;
    return id;
}

const double* DisintegrationTree::step_of(int id) const {
    const Node& n = nodes_[id];
    return source_->atom(n.rep_atom).path.data() +
           static_cast<std::size_t>(n.depth - 1) * source_->d();
}

const double* DisintegrationTree::prefix_of(int id) const {
    return source_->atom(nodes_[id].rep_atom).path.data();
}

PathMeasure DisintegrationTree::flatten() const {
    const PathMeasure& mu = *source_;
    std::vector<Atom> atoms;
    const auto& leaves = depth_index_[mu.T()];
    atoms.reserve(leaves.size());
    for (int id : leaves) {
        // conditional weights multiplied down the branch
        double w = 1.0;
        for (int cur = id; cur != 0; cur = nodes_[cur].parent)
            w *= nodes_[cur].cond_weight;
        atoms.push_back({mu.atom(nodes_[id].rep_atom).path, w});
    }
    return PathMeasure(mu.d(), mu.T(), std::move(atoms));
}

DisintegrationTree disintegrate(std::shared_ptr<const PathMeasure> mu) {
    return DisintegrationTree(std::move(mu));
}

DisintegrationTree disintegrate(const PathMeasure& mu) {
    return DisintegrationTree(std::make_shared<const PathMeasure>(mu));
}

// ---- coupling ---------------------------------------------------------------

Coupling::Coupling(std::shared_ptr<const PathMeasure> left,
                   std::shared_ptr<const PathMeasure> right,
                   std::vector<Entry> entries)
    : left_(std::move(left)), right_(std::move(right)), entries_(std::move(entries)) {
    if (!left_->same_shape(*right_))
        throw ValidationError("dimension-mismatch: coupling marginals have different d or T");
    std::vector<double> lm(left_->size(), 0.0), rm(right_->size(), 0.0);
    double total = 0.0;
    for (const auto& e : entries_) {
        if (e.left >= left_->size() || e.right >= right_->size())
            throw ValidationError("invalid-coupling: atom index out of range");
        if (!(e.weight > 0.0))
            throw ValidationError("invalid-coupling: non-positive entry weight");
        lm[e.left] += e.weight;
        rm[e.right] += e.weight;
        total += e.weight;
    }
    if (std::fabs(total - 1.0) > kWeightTol)
        throw ValidationError("invalid-coupling: weights sum to " + fmt(total));
    for (std::size_t i = 0; i < lm.size(); ++i)
        if (std::fabs(lm[i] - left_->atom(i).weight) > kWeightTol)
            throw ValidationError("invalid-coupling: left marginal off by " +
                                  fmt(lm[i] - left_->atom(i).weight) + " at atom " +
                                  std::to_string(i));
    for (std::size_t j = 0; j < rm.size(); ++j)
        if (std::fabs(rm[j] - right_->atom(j).weight) > kWeightTol)
            throw ValidationError("invalid-coupling: right marginal off by " +
                                  fmt(rm[j] - right_->atom(j).weight) + " at atom " +
                                  std::to_string(j));
}

// ---- operations -------------------------------------------------------------

double moment_p(const PathMeasure& mu, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        s += mu.atom(i).weight * std::pow(mu.path_norm(i), p);
    return s;
}

double tail_p(const PathMeasure& mu, double p, double R) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double r = mu.path_norm(i);
        if (r >= R) s += mu.atom(i).weight * std::pow(r, p);
    }
    return s;
}

double tv_distance(const PathMeasure& mu, const PathMeasure& nu) {
    if (!mu.same_shape(nu))
        throw ValidationError("dimension-mismatch: tv_distance requires equal d and T");
    // both atom lists are sorted, so a two-pointer sweep matches exact paths
    double s = 0.0;
    std::size_t i = 0, j = 0;
    auto less = [](const Atom& a, const Atom& b) {
        return std::lexicographical_compare(a.path.begin(), a.path.end(),
                                            b.path.begin(), b.path.end());
    };
    while (i < mu.size() || j < nu.size()) {
        if (j == nu.size() || (i < mu.size() && less(mu.atom(i), nu.atom(j)))) {
            s += mu.atom(i++).weight;
        } else if (i == mu.size() || less(nu.atom(j), mu.atom(i))) {
            s += nu.atom(j++).weight;
        } else {
            s += std::fabs(mu.atom(i).weight - nu.atom(j).weight);
            ++i;
            ++j;
        }
    }
    return s;
}

PathMeasure clip(const PathMeasure& mu, double R) {
    if (!(R > 0.0)) throw ValidationError("invalid-measure: clip radius must be positive");
    const int d = mu.d(), T = mu.T();
    std::vector<Atom> atoms;
    atoms.reserve(mu.size());
    for (const auto& a : mu.atoms()) {
        Atom out;
        out.weight = a.weight;
        out.path = a.path;
        for (int t = 0; t < T; ++t) {
            double n2 = 0.0;
            for (int c = 0; c < d; ++c) {
                double x = out.path[static_cast<std::size_t>(t) * d + c];
                n2 += x * x;
            }
            double n = std::sqrt(n2);
            // the ulp guard keeps the map exactly idempotent: a step already
            // scaled to norm ~R is not rescaled by a rounding hair
            if (n > R * (1.0 + 1e-14)) {
                double scale = R / n;
                for (int c = 0; c < d; ++c)
                    out.path[static_cast<std::size_t>(t) * d + c] *= scale;
            }
        }
        atoms.push_back(std::move(out));
    }
    return PathMeasure(d, T, std::move(atoms));
}

PathMeasure sample_empirical(const PathMeasure& mu, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ValidationError("invalid-measure: sample size must be positive");
    std::mt19937_64 rng(seed);
    std::vector<double> cdf(mu.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        acc += mu.atom(i).weight;
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    std::vector<std::size_t> counts(mu.size(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        double u = uniform01(rng);
        std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (idx >= counts.size()) idx = counts.size() - 1;
        ++counts[idx];
    }
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (counts[i] > 0)
            atoms.push_back({mu.atom(i).path,
                             static_cast<double>(counts[i]) / static_cast<double>(n)});
    return PathMeasure(mu.d(), mu.T(), std::move(atoms));
}

QuantizeResult quantize(const PathMeasure& mu, double grid_step, double p) {
    if (!(grid_step > 0.0))
        throw ValidationError("invalid-measure: grid step must be positive");
    std::vector<Atom> atoms;
    atoms.reserve(mu.size());
    double cost = 0.0;
    for (const auto& a : mu.atoms()) {
        Atom out;
        out.weight = a.weight;
        out.path.resize(a.path.size());
        double d2 = 0.0;
        for (std::size_t c = 0; c < a.path.size(); ++c) {
            long long k = std::llround(a.path[c] / grid_step);
            out.path[c] = grid_step * static_cast<double>(k);
            double diff = a.path[c] - out.path[c];
            d2 += diff * diff;
        }
        cost += a.weight * std::pow(std::sqrt(d2), p);
        atoms.push_back(std::move(out));
    }
    return {PathMeasure(mu.d(), mu.T(), std::move(atoms)), cost};
}

} // namespace aot
