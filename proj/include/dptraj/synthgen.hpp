#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dptraj/rng.hpp"
#include "dptraj/trajectory.hpp"

namespace dptraj {

/// Ground-truth world for desk-scale experiments: a g x g grid with a known
/// first-order chain over its cells (row-major ids, START = g*g row in
/// `transitions`, END = last column). Optional second-order overrides give
/// selected (prev, cur) contexts their own next-state distribution, so the
/// adaptive selector has something real to find.
struct ToyWorldSpec {
    BoundingBox bbox{0.0, 0.0, 1.0, 1.0};
    int g = 2;
    /// (g*g + 1) rows (cells then START) over g*g + 1 columns (cells then
    /// END). Each row must be a probability distribution; the START row must
    /// not select END directly.
    std::vector<std::vector<double>> transitions;
    /// Second-order overrides: (prev_cell, cur_cell) -> distribution over
    /// g*g cells + END.
    std::map<std::pair<int, int>, std::vector<double>> second_order;
    int points_per_visit = 1;
    std::size_t n_trajectories = 100;
};

/// Validates distribution rows; throws std::invalid_argument on failure.
void validate_world(const ToyWorldSpec& spec);

/// Samples state walks from the ground-truth chain (capped at 50 states)
/// and emits points_per_visit uniform points inside each visited cell.
/// Deterministic given the rng seed.
TrajectoryDataset generate_toy_dataset(const ToyWorldSpec& spec, const Rng& rng);

/// Named fixtures:
///  - "corridor":     6x6, a single dominant west-to-east flow, 5000
///                    trajectories, one point per visit.
///  - "two_cluster":  5x5, two dense regions with inter-cluster trips.
///  - "ring":         4x4, cyclic flow around the border cells.
///  - "second_order": 5x5, two routes crossing at a hub whose continuation
///                    depends on the previous cell, plus low-traffic feeder
///                    routes merging into a shared corridor.
/// Throws std::invalid_argument for unknown names.
ToyWorldSpec builtin_world(const std::string& name);

std::vector<std::string> builtin_world_names();

}  // namespace dptraj
