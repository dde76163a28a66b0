#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dptraj/grid.hpp"

namespace dptraj {

/// Undirected adjacency graph over grid leaves. Two leaves are connected
/// when their closed rectangles intersect (shared edge or corner, across
/// layers); the edge weight is the Euclidean distance between centroids.
struct StateGraph {
    StateId node_count = 0;
    struct Edge {
        StateId a;
        StateId b;
        double weight;
    };
    std::vector<Edge> edges;
};

StateGraph build_state_graph(const TwoLayerGrid& grid);

/// Node counts of minimum-geographic-weight paths. l(i,i) = 1; for distinct
/// reachable states l >= 2; unreachable pairs are marked absent. Weight ties
/// break toward fewer nodes.
class PathLengthMatrix {
public:
    explicit PathLengthMatrix(StateId n) : n_(n), hops_(std::size_t(n) * n, 0) {}

    StateId size() const { return n_; }
    bool reachable(StateId i, StateId j) const { return hops_[idx(i, j)] != 0; }
    /// Path node count; only meaningful when reachable.
    std::uint32_t nodes(StateId i, StateId j) const { return hops_[idx(i, j)]; }
    double operator()(StateId i, StateId j) const { return static_cast<double>(hops_[idx(i, j)]); }

    void set(StateId i, StateId j, std::uint32_t node_count) { hops_[idx(i, j)] = node_count; }

    /// Largest node count over all reachable pairs (>= 1 when n >= 1).
    std::uint32_t max_nodes() const;

private:
    std::size_t idx(StateId i, StateId j) const { return std::size_t(i) * n_ + j; }

    StateId n_;
    std::vector<std::uint32_t> hops_;
};

/// All-sources Dijkstra over edge weights, recording the node count of the
/// minimum-weight path. Equal-weight paths prefer fewer nodes, then the
/// lower predecessor index.
PathLengthMatrix shortest_path_lengths(const StateGraph& graph);

/// Estimated trajectory counts per (start state, end state); entries are
/// nonnegative and sum to n_target within solver tolerance.
struct TripMatrix {
    StateId m = 0;
    double n_target = 0.0;
    std::vector<double> t;  // m x m, row-major

    double operator()(StateId i, StateId j) const { return t[std::size_t(i) * m + j]; }
    double sum() const;
    std::string to_csv() const;
};

struct TripSolverOptions {
    std::size_t max_iterations = 100000;
    double kkt_tol_scale = 1e-6;  // converged when KKT residual <= scale * n
    std::vector<double>* objective_trace = nullptr;  // accepted-iteration objectives
};

/// Minimizes
///   sum_i (sum_j t_ij / l_ij - b_i)^2 + sum_j (sum_i t_ij / l_ij - q_j)^2
/// over t >= 0 with sum t = n, via projected gradient descent with
/// backtracking line search; the scaled simplex makes the projection cheap.
/// Unreachable pairs are fixed at zero. Negative entries of b and q are
/// clamped to zero first (post-processing of the noisy rows). Throws
/// std::invalid_argument when every pair is unreachable or n <= 0.
TripMatrix estimate_trip_distribution(const std::vector<double>& b, const std::vector<double>& q,
                                      const PathLengthMatrix& lengths, double n,
                                      const TripSolverOptions& options = {});

}  // namespace dptraj
