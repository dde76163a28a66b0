#pragma once

#include <string>
#include <vector>

#include "dptraj/geometry.hpp"

namespace dptraj {

/// Ordered sequence of at least one finite point.
struct Trajectory {
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
};

/// Sum of Euclidean distances between consecutive points; 0 for a single point.
double trajectory_length(const Trajectory& t);

/// Largest pairwise Euclidean distance; 0 for a single point.
double trajectory_diameter(const Trajectory& t);

/// Throws std::invalid_argument if the trajectory is empty or has a
/// non-finite coordinate.
void validate_trajectory(const Trajectory& t);

/// A set of trajectories together with the bounding box they live in.
/// The box must contain every point; it may be wider than the tight hull
/// (e.g. a generator's world box).
struct TrajectoryDataset {
    std::vector<Trajectory> trajectories;
    BoundingBox bbox;

    std::size_t size() const { return trajectories.size(); }
};

/// Validates dataset invariants: at least one trajectory, valid bbox,
/// every point finite and inside the bbox. Throws std::invalid_argument.
void validate_dataset(const TrajectoryDataset& d);

/// Tight bounding box of all points. Zero-extent axes are padded by 0.5 per
/// side so the result is always a valid box. Throws on empty input.
BoundingBox tight_bbox(const std::vector<Trajectory>& trajectories);

}  // namespace dptraj
