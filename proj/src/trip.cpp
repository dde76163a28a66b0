#include "dptraj/trip.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace dptraj {

StateGraph build_state_graph(const TwoLayerGrid& grid) {
    StateGraph graph;
    graph.node_count = grid.state_count();
    for (StateId i = 0; i < graph.node_count; ++i) {
        const CellRect& ri = grid.leaf_rect(i);
        for (StateId j = i + 1; j < graph.node_count; ++j) {
            const CellRect& rj = grid.leaf_rect(j);
            if (ri.touches(rj)) {
                graph.edges.push_back({i, j, distance(ri.centroid(), rj.centroid())});
            }
        }
    }
    return graph;
}

std::uint32_t PathLengthMatrix::max_nodes() const {
    std::uint32_t best = 0;
    for (std::uint32_t h : hops_) {
        best = std::max(best, h);
    }
    return best;
}

PathLengthMatrix shortest_path_lengths(const StateGraph& graph) {
    const StateId n = graph.node_count;
    PathLengthMatrix lengths(n);

    std::vector<std::vector<std::pair<StateId, double>>> adjacency(n);
    for (const auto& e : graph.edges) {
        adjacency[e.a].emplace_back(e.b, e.weight);
        adjacency[e.b].emplace_back(e.a, e.weight);
    }

    // Keyed by (distance, node count, node): equal-weight paths prefer fewer
    // nodes, the node index only fixes the pop order.
    using QueueItem = std::tuple<double, std::uint32_t, StateId>;
    std::vector<double> dist(n);
    std::vector<std::uint32_t> hops(n);
    for (StateId src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        std::fill(hops.begin(), hops.end(), 0);
        std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;
        dist[src] = 0.0;
        hops[src] = 1;
        queue.emplace(0.0, 1, src);
        while (!queue.empty()) {
            const auto [d, h, u] = queue.top();
            queue.pop();
            if (d != dist[u] || h != hops[u]) {
                continue;  // stale entry
            }
            for (const auto& [v, w] : adjacency[u]) {
                const double cand_d = d + w;
                const std::uint32_t cand_h = h + 1;
                if (hops[v] == 0 || cand_d < dist[v] ||
                    (cand_d == dist[v] && cand_h < hops[v])) {
                    dist[v] = cand_d;
                    hops[v] = cand_h;
                    queue.emplace(cand_d, cand_h, v);
                }
            }
        }
        for (StateId j = 0; j < n; ++j) {
            lengths.set(src, j, hops[j]);
        }
    }
    return lengths;
}

double TripMatrix::sum() const { return std::accumulate(t.begin(), t.end(), 0.0); }

std::string TripMatrix::to_csv() const {
    std::string out;
    char buf[32];
    for (StateId i = 0; i < m; ++i) {
        for (StateId j = 0; j < m; ++j) {
            if (j > 0) {
                out.push_back(',');
            }
            const int k = std::snprintf(buf, sizeof(buf), "%.17g", (*this)(i, j));
            out.append(buf, static_cast<std::size_t>(k));
        }
        out.push_back('\n');
    }
    return out;
}

namespace {

// Euclidean projection onto {x >= 0, sum x = target}.
void project_simplex(std::vector<double>& x, double target) {
    static thread_local std::vector<double> sorted;
    sorted = x;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double prefix = 0.0;
    double tau = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        prefix += sorted[k];
        const double cand = (prefix - target) / static_cast<double>(k + 1);
        if (sorted[k] - cand > 0.0) {
            tau = cand;
        }
    }
    for (double& v : x) {
        v = std::max(v - tau, 0.0);
    }
}

struct TripProblem {
    StateId m;
    std::vector<double> inv_l;              // 1/l_ij over the support, 0 elsewhere
    std::vector<std::size_t> support;       // flat (i * m + j) reachable positions
    const std::vector<double>* b;
    const std::vector<double>* q;

    // Objective and gradient on the support vector x (aligned with support).
    double objective(const std::vector<double>& x, std::vector<double>& row_res,
                     std::vector<double>& col_res) const {
        row_res.assign(m, 0.0);
        col_res.assign(m, 0.0);
        for (std::size_t s = 0; s < support.size(); ++s) {
            const std::size_t flat = support[s];
            const StateId i = static_cast<StateId>(flat / m);
            const StateId j = static_cast<StateId>(flat % m);
            const double scaled = x[s] * inv_l[flat];
            row_res[i] += scaled;
            col_res[j] += scaled;
        }
        double f = 0.0;
        for (StateId i = 0; i < m; ++i) {
            row_res[i] -= (*b)[i];
            f += row_res[i] * row_res[i];
        }
        for (StateId j = 0; j < m; ++j) {
            col_res[j] -= (*q)[j];
            f += col_res[j] * col_res[j];
        }
        return f;
    }

    void gradient(const std::vector<double>& row_res, const std::vector<double>& col_res,
                  std::vector<double>& g) const {
        g.resize(support.size());
        for (std::size_t s = 0; s < support.size(); ++s) {
            const std::size_t flat = support[s];
            const StateId i = static_cast<StateId>(flat / m);
            const StateId j = static_cast<StateId>(flat % m);
            g[s] = 2.0 * (row_res[i] + col_res[j]) * inv_l[flat];
        }
    }
};

double kkt_residual(const std::vector<double>& x, const std::vector<double>& g) {
    double mu_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t s = 0; s < x.size(); ++s) {
        if (x[s] > 0.0) {
            mu_sum += g[s];
            ++free_count;
        }
    }
    const double mu = free_count > 0 ? -mu_sum / static_cast<double>(free_count) : 0.0;
    double residual = 0.0;
    for (std::size_t s = 0; s < x.size(); ++s) {
        const double stat = g[s] + mu;
        if (x[s] > 0.0) {
            residual = std::max(residual, std::abs(stat));
        } else {
            residual = std::max(residual, std::max(0.0, -stat));
        }
    }
    return residual;
}

}  // namespace

TripMatrix estimate_trip_distribution(const std::vector<double>& b, const std::vector<double>& q,
                                      const PathLengthMatrix& lengths, double n,
                                      const TripSolverOptions& options) {
    const StateId m = lengths.size();
    if (b.size() != m || q.size() != m) {
        throw std::invalid_argument("b and q must have one entry per state");
    }
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("trip total must be positive and finite");
    }

    // Noisy rows may be negative; zero them before solving (post-processing).
    std::vector<double> b_pos(m), q_pos(m);
    for (StateId i = 0; i < m; ++i) {
        b_pos[i] = std::max(b[i], 0.0);
        q_pos[i] = std::max(q[i], 0.0);
    }

    TripProblem problem;
    problem.m = m;
    problem.b = &b_pos;
    problem.q = &q_pos;
    problem.inv_l.assign(std::size_t(m) * m, 0.0);
    for (StateId i = 0; i < m; ++i) {
        for (StateId j = 0; j < m; ++j) {
            if (lengths.reachable(i, j)) {
                const std::size_t flat = std::size_t(i) * m + j;
                problem.inv_l[flat] = 1.0 / lengths(i, j);
                problem.support.push_back(flat);
            }
        }
    }
    if (problem.support.empty()) {
        throw std::invalid_argument("no reachable (start, end) pair; cannot estimate trips");
    }

    std::vector<double> x(problem.support.size(), n / static_cast<double>(problem.support.size()));
    std::vector<double> row_res, col_res, g, x_next, row_next, col_next;
    double f = problem.objective(x, row_res, col_res);
    double step = 1.0;
    const double tol = options.kkt_tol_scale * n;
    if (options.objective_trace != nullptr) {
        options.objective_trace->push_back(f);
    }

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        problem.gradient(row_res, col_res, g);
        if (kkt_residual(x, g) <= tol) {
            break;
        }
        step *= 2.0;  // try a longer step first, backtrack as needed
        bool accepted = false;
        while (step > 1e-18) {
            x_next = x;
            for (std::size_t s = 0; s < x.size(); ++s) {
                x_next[s] -= step * g[s];
            }
            project_simplex(x_next, n);
            const double f_next = problem.objective(x_next, row_next, col_next);
            double quad = 0.0;
            double lin = 0.0;
            for (std::size_t s = 0; s < x.size(); ++s) {
                const double delta = x_next[s] - x[s];
                quad += delta * delta;
                lin += g[s] * delta;
            }
            if (quad == 0.0) {
                break;  // projection returned the same point: stationary
            }
            if (f_next <= f + lin + quad / (2.0 * step)) {
                x.swap(x_next);
                row_res.swap(row_next);
                col_res.swap(col_next);
                f = f_next;
                accepted = true;
                if (options.objective_trace != nullptr) {
                    options.objective_trace->push_back(f);
                }
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }
    }

    TripMatrix trips;
    trips.m = m;
    trips.n_target = n;
    trips.t.assign(std::size_t(m) * m, 0.0);
    for (std::size_t s = 0; s < problem.support.size(); ++s) {
        trips.t[problem.support[s]] = x[s];
    }
    return trips;
}

}  // namespace dptraj
