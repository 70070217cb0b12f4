#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace aot {

inline constexpr double kWeightTol = 1e-9; // repo-wide weight tolerance

/// One weighted path atom. `path` is row-major by time: T blocks of d values.
struct Atom {
    std::vector<double> path;
    double weight = 0.0;
};

/// Finitely supported probability measure on (R^d)^T.
///
/// Construction validates (weights positive, sum to one within kWeightTol,
/// entries finite), merges duplicate paths by summing weights, and sorts
/// atoms lexicographically so all downstream traversals are deterministic.
/// Instances are immutable afterwards and safe to share across threads.
class PathMeasure {
public:
    PathMeasure(int d, int num_steps, std::vector<Atom> atoms);

    int d() const { return d_; }
    int T() const { return T_; }
    std::size_t size() const { return atoms_.size(); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const Atom& atom(std::size_t i) const { return atoms_[i]; }

    /// Coordinate j of time step t (both 0-based) of atom i.
    double coord(std::size_t i, int t, int j) const {
        return atoms_[i].path[static_cast<std::size_t>(t) * d_ + j];
    }
    /// Euclidean norm of the full path of atom i (on R^{dT}).
    double path_norm(std::size_t i) const;

    bool same_shape(const PathMeasure& other) const {
        return d_ == other.d_ && T_ == other.T_;
    }

private:
    int d_;
    int T_;
    std::vector<Atom> atoms_;
};

/// Trie of conditional kernels built from a PathMeasure. Nodes at depth t
/// correspond to distinct prefixes x_{1:t}; node 0 is the root (depth 0).
/// Children are stored in lexicographic step order.
class DisintegrationTree {
public:
    struct Node {
        int parent = -1;
        int depth = 0;
        double mass = 0.0;        // absolute prefix mass
        double cond_weight = 0.0; // weight given the parent (1 for root)
        int rep_atom = 0;         // any atom whose path passes through here
        int local_index = 0;      // index within this depth level
        std::vector<int> children;
    };

    explicit DisintegrationTree(std::shared_ptr<const PathMeasure> source);

    const PathMeasure& source() const { return *source_; }
    std::shared_ptr<const PathMeasure> source_ptr() const { return source_; }

    const Node& node(int id) const { return nodes_[id]; }
    int root() const { return 0; }
    const std::vector<int>& at_depth(int t) const { return depth_index_[t]; }
    int leaf_of_atom(std::size_t i) const { return leaf_of_atom_[i]; }
    std::size_t atom_of_leaf(int id) const {
        return static_cast<std::size_t>(nodes_[id].rep_atom);
    }
    /// Ancestor of atom i at the given depth (depth T yields the leaf).
    int node_of_atom_at(std::size_t i, int depth) const;

    /// Incoming step value of a node (the x_t that leads into it), d components.
    const double* step_of(int id) const;
    /// Prefix coordinates x_{1:depth} of a node, d*depth components.
    const double* prefix_of(int id) const;

    /// Reconstructs the source measure from leaf masses (round-trip check).
    PathMeasure flatten() const;

private:
    std::shared_ptr<const PathMeasure> source_;
    std::vector<Node> nodes_;
    std::vector<std::vector<int>> depth_index_;
    std::vector<int> leaf_of_atom_;
};

DisintegrationTree disintegrate(std::shared_ptr<const PathMeasure> mu);
DisintegrationTree disintegrate(const PathMeasure& mu); // copies the measure

/// Weighted joint atoms over pairs of paths of two measures.
/// Construction checks both marginals against the referenced measures.
class Coupling {
public:
    struct Entry {
        std::size_t left = 0;
        std::size_t right = 0;
        double weight = 0.0;
    };

    Coupling(std::shared_ptr<const PathMeasure> left,
             std::shared_ptr<const PathMeasure> right,
             std::vector<Entry> entries);

    const PathMeasure& left() const { return *left_; }
    const PathMeasure& right() const { return *right_; }
    std::shared_ptr<const PathMeasure> left_ptr() const { return left_; }
    std::shared_ptr<const PathMeasure> right_ptr() const { return right_; }
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::shared_ptr<const PathMeasure> left_;
    std::shared_ptr<const PathMeasure> right_;
    std::vector<Entry> entries_;
};

// ---- basic operations ------------------------------------------------------

/// Sum_i w_i |x_i|^p with the Euclidean norm on R^{dT}.
double moment_p(const PathMeasure& mu, double p);

/// Sum over atoms with |x_i| >= R of w_i |x_i|^p.
double tail_p(const PathMeasure& mu, double p, double R);

/// Total variation by exact-path matching; in [0, 2].
double tv_distance(const PathMeasure& mu, const PathMeasure& nu);

/// Per-time radial projection onto the ball of radius R; colliding atoms merge.
PathMeasure clip(const PathMeasure& mu, double R);

/// n i.i.d. atom draws; weights k_i/n. Deterministic per seed.
PathMeasure sample_empirical(const PathMeasure& mu, std::size_t n, std::uint64_t seed);

struct QuantizeResult {
    PathMeasure measure;
    double cost_p = 0.0; // Sum_i w_i |x_i - q(x_i)|^p, the quantization budget
};

/// Rounds every coordinate to the nearest grid multiple; merges collisions.
QuantizeResult quantize(const PathMeasure& mu, double grid_step, double p);

} // namespace aot
