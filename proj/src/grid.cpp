#include "dptraj/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "dptraj/laplace.hpp"

namespace dptraj {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

std::vector<double> make_edges(double lo, double hi, int n) {
    std::vector<double> edges(n + 1);
    const double span = hi - lo;
    for (int i = 0; i <= n; ++i) {
        edges[i] = lo + span * (static_cast<double>(i) / n);
    }
    // Exact endpoints so neighboring cells across layers share boundaries
    // bitwise and the leaves tile the box with no float gaps.
    edges.front() = lo;
    edges.back() = hi;
    return edges;
}

// Index j with edges[j] <= x < edges[j+1]; the final edge is closed.
int locate_in_edges(const std::vector<double>& edges, double x) {
    const int n = static_cast<int>(edges.size()) - 1;
    const double frac = (x - edges.front()) / (edges.back() - edges.front());
    int j = std::clamp(static_cast<int>(frac * n), 0, n - 1);
    while (j > 0 && x < edges[j]) {
        --j;
    }
    while (j < n - 1 && x >= edges[j + 1]) {
        ++j;
    }
    return j;
}

}  // namespace

FirstLayerGrid::FirstLayerGrid(const BoundingBox& bbox, int k) : bbox_(bbox), k_(k) {
    if (!bbox.valid()) {
        throw std::invalid_argument("grid bounding box is invalid");
    }
    if (k < 1) {
        throw std::invalid_argument("grid K must be at least 1");
    }
    edges_x_ = make_edges(bbox.xmin, bbox.xmax, k);
    edges_y_ = make_edges(bbox.ymin, bbox.ymax, k);
}

int FirstLayerGrid::cell_of(const Point& p) const {
    if (!p.finite() || !bbox_.contains(p)) {
        throw std::invalid_argument("point outside the grid bounding box");
    }
    const int ix = locate_in_edges(edges_x_, p.x);
    const int iy = locate_in_edges(edges_y_, p.y);
    return iy * k_ + ix;
}

CellRect FirstLayerGrid::cell_rect(int cell) const {
    const int ix = cell % k_;
    const int iy = cell / k_;
    return {edges_x_[ix], edges_y_[iy], edges_x_[ix + 1], edges_y_[iy + 1]};
}

double DensityVector::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

TwoLayerGrid::TwoLayerGrid(FirstLayerGrid first_layer, const std::vector<int>& kappas)
    : first_(std::move(first_layer)) {
    const int n_cells = first_.cell_count();
    if (static_cast<int>(kappas.size()) != n_cells) {
        throw std::invalid_argument("kappa vector size must match the first-layer cell count");
    }
    cells_.resize(n_cells);
    for (int i = 0; i < n_cells; ++i) {
        CellNode& node = cells_[i];
        node.first_state = static_cast<StateId>(leaves_.size());
        const CellRect rect = first_.cell_rect(i);
        if (kappas[i] >= 2) {
            node.kappa = kappas[i];
            node.sub_edges_x = make_edges(rect.x0, rect.x1, node.kappa);
            node.sub_edges_y = make_edges(rect.y0, rect.y1, node.kappa);
            for (int jy = 0; jy < node.kappa; ++jy) {
                for (int jx = 0; jx < node.kappa; ++jx) {
                    leaves_.push_back({node.sub_edges_x[jx], node.sub_edges_y[jy],
                                       node.sub_edges_x[jx + 1], node.sub_edges_y[jy + 1]});
                }
            }
            ++expanded_cells_;
        } else {
            node.kappa = 1;
            leaves_.push_back(rect);
        }
    }
}

StateId TwoLayerGrid::locate_state(const Point& p) const {
    const int cell = first_.cell_of(p);
    const CellNode& node = cells_[cell];
    if (node.kappa <= 1) {
        return node.first_state;
    }
    const int jx = locate_in_edges(node.sub_edges_x, p.x);
    const int jy = locate_in_edges(node.sub_edges_y, p.y);
    return node.first_state + static_cast<StateId>(jy * node.kappa + jx);
}

std::string TwoLayerGrid::describe() const {
    std::string out;
    char buf[160];
    for (StateId s = 0; s < state_count(); ++s) {
        const CellRect& r = leaves_[s];
        const int n = std::snprintf(buf, sizeof(buf), "%u %.17g %.17g %.17g %.17g\n", s, r.x0,
                                    r.y0, r.x1, r.y1);
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

int choose_first_layer_k(std::size_t n_trajectories, double c) {
    if (n_trajectories == 0 || !(c > 0.0)) {
        throw std::invalid_argument("choose_first_layer_k requires n >= 1 and c > 0");
    }
    const int k = round_half_up(std::sqrt(static_cast<double>(n_trajectories) / c));
    return std::max(k, 2);
}

int choose_kappa(double noisy_density, int k, double pop, double denom) {
    if (!(denom > 0.0)) {
        throw std::invalid_argument("kappa denominator must be positive");
    }
    const double d = std::max(noisy_density, 0.0);
    return round_half_up(std::sqrt(d * k * pop / denom));
}

DensityVector normalized_density(const TrajectoryDataset& dataset, const FirstLayerGrid& grid) {
    DensityVector density;
    density.values.assign(grid.cell_count(), 0.0);
    std::vector<std::pair<int, int>> runs;  // cell -> occurrence count, per trajectory
    for (const Trajectory& t : dataset.trajectories) {
        runs.clear();
        int prev = -1;
        int total = 0;
        for (const Point& p : t.points) {
            const int cell = grid.cell_of(p);
            if (cell == prev) {
                continue;  // same maximal run
            }
            prev = cell;
            ++total;
            auto it = std::find_if(runs.begin(), runs.end(),
                                   [cell](const auto& e) { return e.first == cell; });
            if (it == runs.end()) {
                runs.emplace_back(cell, 1);
            } else {
                ++it->second;
            }
        }
        for (const auto& [cell, count] : runs) {
            density.values[cell] += static_cast<double>(count) / total;
        }
    }
    return density;
}

DensityVector add_density_noise(const DensityVector& density, double epsilon1, Rng& rng) {
    if (!(epsilon1 > 0.0)) {
        throw std::invalid_argument("epsilon1 must be positive");
    }
    DensityVector out = density;
    out.noised = true;
    if (std::isinf(epsilon1)) {
        return out;
    }
    const double scale = 1.0 / epsilon1;
    for (double& v : out.values) {
        v += laplace_sample(scale, rng);
    }
    return out;
}

TwoLayerGridResult build_two_layer_grid(const TrajectoryDataset& dataset, int k, double epsilon1,
                                        double pop, double kappa_denom, Rng& rng) {
    FirstLayerGrid first(dataset.bbox, k);
    const DensityVector density = normalized_density(dataset, first);
    DensityVector noisy = add_density_noise(density, epsilon1, rng);
    std::vector<int> kappas(noisy.values.size());
    for (std::size_t i = 0; i < noisy.values.size(); ++i) {
        kappas[i] = choose_kappa(noisy.values[i], k, pop, kappa_denom);
    }
    return {TwoLayerGrid(std::move(first), kappas), std::move(noisy)};
}

std::vector<StateId> trajectory_to_states(const Trajectory& t, const TwoLayerGrid& grid) {
    std::vector<StateId> states;
    states.reserve(t.points.size());
    for (const Point& p : t.points) {
        const StateId s = grid.locate_state(p);
        if (states.empty() || states.back() != s) {
            states.push_back(s);
        }
    }
    return states;
}

std::vector<int> trajectory_to_cells(const Trajectory& t, const FirstLayerGrid& grid) {
    std::vector<int> cells;
    cells.reserve(t.points.size());
    for (const Point& p : t.points) {
        const int c = grid.cell_of(p);
        if (cells.empty() || cells.back() != c) {
            cells.push_back(c);
        }
    }
    return cells;
}

}  // namespace dptraj
