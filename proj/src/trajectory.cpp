#include "dptraj/trajectory.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dptraj {

double trajectory_length(const Trajectory& t) {
    double total = 0.0;
    for (std::size_t i = 1; i < t.points.size(); ++i) {
        total += distance(t.points[i - 1], t.points[i]);
    }
    return total;
}

double trajectory_diameter(const Trajectory& t) {
    double best = 0.0;
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        for (std::size_t j = i + 1; j < t.points.size(); ++j) {
            best = std::max(best, distance(t.points[i], t.points[j]));
        }
    }
    return best;
}

void validate_trajectory(const Trajectory& t) {
    if (t.points.empty()) {
        throw std::invalid_argument("trajectory must contain at least one point");
    }
    for (const Point& p : t.points) {
        if (!p.finite()) {
            throw std::invalid_argument("trajectory contains a non-finite coordinate");
        }
    }
}

void validate_dataset(const TrajectoryDataset& d) {
    if (d.trajectories.empty()) {
        throw std::invalid_argument("dataset must contain at least one trajectory");
    }
    if (!d.bbox.valid()) {
        throw std::invalid_argument("dataset bounding box is invalid");
    }
    for (const Trajectory& t : d.trajectories) {
        validate_trajectory(t);
        for (const Point& p : t.points) {
            if (!d.bbox.contains(p)) {
                throw std::invalid_argument("trajectory point outside the dataset bounding box");
            }
        }
    }
}

BoundingBox tight_bbox(const std::vector<Trajectory>& trajectories) {
    double xmin = std::numeric_limits<double>::infinity();
    double ymin = std::numeric_limits<double>::infinity();
    double xmax = -std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const Trajectory& t : trajectories) {
        for (const Point& p : t.points) {
            xmin = std::min(xmin, p.x);
            ymin = std::min(ymin, p.y);
            xmax = std::max(xmax, p.x);
            ymax = std::max(ymax, p.y);
            any = true;
        }
    }
    if (!any) {
        throw std::invalid_argument("cannot compute a bounding box of an empty dataset");
    }
    if (xmin == xmax) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymin == ymax) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    return {xmin, ymin, xmax, ymax};
}

}  // namespace dptraj
