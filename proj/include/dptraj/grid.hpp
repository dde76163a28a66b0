#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dptraj/rng.hpp"
#include "dptraj/trajectory.hpp"

namespace dptraj {

using StateId = std::uint32_t;

/// Uniform K x K grid tiling a bounding box. Cell (ix, iy) covers
/// [edge_x[ix], edge_x[ix+1]) x [edge_y[iy], edge_y[iy+1]); the global max
/// edges are closed. Cells are indexed row-major: iy * K + ix, iy counted
/// from ymin.
class FirstLayerGrid {
public:
    FirstLayerGrid(const BoundingBox& bbox, int k);

    const BoundingBox& bbox() const { return bbox_; }
    int k() const { return k_; }
    int cell_count() const { return k_ * k_; }

    /// First-layer cell index of a point. Throws std::invalid_argument if
    /// the point lies outside the bbox.
    int cell_of(const Point& p) const;

    CellRect cell_rect(int cell) const;

private:
    BoundingBox bbox_;
    int k_;
    std::vector<double> edges_x_;  // size k+1, edges_x_[k] == bbox.xmax exactly
    std::vector<double> edges_y_;
};

/// Per first-layer cell, length-normalized trajectory occurrence mass.
/// Each trajectory contributes total mass exactly 1 before noise; noisy
/// entries may be negative.
struct DensityVector {
    std::vector<double> values;
    bool noised = false;

    double sum() const;
};

/// First layer plus selectively expanded cells. Every leaf (unexpanded
/// first-layer cell or second-layer subcell) is a Markov state. StateIds
/// are assigned row-major over first-layer cells, subcells row-major within
/// their parent, so the index is reproducible.
class TwoLayerGrid {
public:
    /// kappas[i] <= 1 leaves cell i unexpanded; kappas[i] >= 2 splits it
    /// into kappas[i] x kappas[i] subcells.
    TwoLayerGrid(FirstLayerGrid first_layer, const std::vector<int>& kappas);

    const FirstLayerGrid& first_layer() const { return first_; }
    const BoundingBox& bbox() const { return first_.bbox(); }

    StateId state_count() const { return static_cast<StateId>(leaves_.size()); }
    std::size_t expanded_cell_count() const { return expanded_cells_; }

    /// Leaf containing p (half-open cells, global max edges closed).
    /// Throws std::invalid_argument if p is outside the bbox.
    StateId locate_state(const Point& p) const;

    const CellRect& leaf_rect(StateId s) const { return leaves_.at(s); }

    /// Diagnostic export: one "state_id x0 y0 x1 y1" line per leaf.
    std::string describe() const;

private:
    struct CellNode {
        int kappa = 1;                    // >= 2 when expanded
        StateId first_state = 0;          // leaf id, or first subcell leaf id
        std::vector<double> sub_edges_x;  // kappa+1 edges when expanded
        std::vector<double> sub_edges_y;
    };

    FirstLayerGrid first_;
    std::vector<CellNode> cells_;
    std::vector<CellRect> leaves_;
    std::size_t expanded_cells_ = 0;
};

/// K = round_half_up(sqrt(n / c)), clamped to at least 2.
int choose_first_layer_k(std::size_t n_trajectories, double c);

/// kappa = round_half_up(sqrt(max(d, 0) * K * pop / denom)). Values <= 1
/// mean "do not expand".
int choose_kappa(double noisy_density, int k, double pop, double denom);

inline constexpr double kDefaultKappaDenom = 2e7;

/// Length-normalized occurrence mass per first-layer cell. An occurrence is
/// a maximal run of consecutive points inside one cell, so a trajectory that
/// leaves and re-enters a cell counts it twice; each trajectory's occurrence
/// counts are divided by their total, giving it mass exactly 1.
DensityVector normalized_density(const TrajectoryDataset& dataset, const FirstLayerGrid& grid);

/// Adds independent Laplace(1/epsilon1) noise per entry (the density query
/// has unit L1 sensitivity). epsilon1 = +infinity disables the noise but
/// still marks the vector as noised.
DensityVector add_density_noise(const DensityVector& density, double epsilon1, Rng& rng);

/// Full discretization step: density estimate, epsilon1 noise, expansion of
/// dense cells. Noisy densities are used as-is for the expansion decision
/// (post-processing); the returned vector is kept for reporting.
struct TwoLayerGridResult {
    TwoLayerGrid grid;
    DensityVector noisy_density;
};
TwoLayerGridResult build_two_layer_grid(const TrajectoryDataset& dataset, int k, double epsilon1,
                                        double pop, double kappa_denom, Rng& rng);

/// Maps points to states and collapses consecutive duplicates. Result is
/// non-empty; throws if any point is outside the grid.
std::vector<StateId> trajectory_to_states(const Trajectory& t, const TwoLayerGrid& grid);

/// Same collapse on a plain uniform grid (used by the metrics module).
std::vector<int> trajectory_to_cells(const Trajectory& t, const FirstLayerGrid& grid);

}  // namespace dptraj
