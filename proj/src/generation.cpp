#include "dptraj/generation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace dptraj {

namespace {

constexpr int kStartResampleLimit = 100;

// Samples an index proportional to nonnegative weights; nullopt when the
// total mass is zero.
std::optional<std::size_t> sample_index(const std::vector<double>& weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    if (!(total > 0.0)) {
        return std::nullopt;
    }
    const double u = rng.uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) {
            return i;
        }
    }
    // Rounding pushed u past the last positive weight.
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) {
            return i;
        }
    }
    return std::nullopt;
}

double masked_row_sum(const std::vector<double>& row, StateId masked) {
    double sum = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i != masked) {
            sum += row[i];
        }
    }
    return sum;
}

void require_walk_models(const MarkovModel& m1, const MarkovModel& m2) {
    if (m1.order() != 1 || m2.order() != 2) {
        throw std::invalid_argument("random walk needs an order-1 and an order-2 model");
    }
    if (!m1.noised() || !m1.normcut_applied() || !m2.noised() || !m2.normcut_applied()) {
        throw std::logic_error("random walk requires noised, normcut models");
    }
}

// Sample the next token (real state or end_target) from a count row. The
// current state is masked out: true self-transition counts are zero by
// construction, so any mass there is pure noise, and emitting it would put
// consecutive duplicates into the walk.
std::optional<StateId> sample_from_row(const std::vector<double>& row, StateId masked, Rng& rng) {
    std::vector<double> weights = row;
    if (masked < weights.size()) {
        weights[masked] = 0.0;
    }
    const auto idx = sample_index(weights, rng);
    if (!idx) {
        return std::nullopt;
    }
    return static_cast<StateId>(*idx);
}

std::optional<StateId> sample_next(const MarkovModel& m1, const MarkovModel& m2, StateId last,
                                   StateId now, ModelChoice choice, Rng& rng) {
    if (choice == ModelChoice::UseSecondOrder) {
        const std::vector<double>* row = m2.row2(last, now);
        if (row != nullptr) {
            const auto next = sample_from_row(*row, now, rng);
            if (next) {
                return next;
            }
        }
        // Absent or all-zero context: fall back to the first order.
    }
    return sample_from_row(m1.row(now), now, rng);
}

ModelChoice choose(const MarkovModel& m1, StateId now, const SelectionThresholds& thresholds,
                   WalkOptions::Policy policy) {
    switch (policy) {
        case WalkOptions::Policy::FirstOrderOnly:
            return ModelChoice::UseFirstOrder;
        case WalkOptions::Policy::SecondOrderOnly:
            return ModelChoice::UseSecondOrder;
        case WalkOptions::Policy::Adaptive:
            break;
    }
    const std::vector<double>& row = m1.row(now);
    // Selection statistics cover real next states only, not the virtual end.
    const std::vector<double> real_counts(row.begin(), row.begin() + m1.state_count());
    return select_model(real_counts, thresholds);
}

std::vector<StateId> walk_from(StateId start, const MarkovModel& m1, const MarkovModel& m2,
                               const SelectionThresholds& thresholds, Rng& rng,
                               std::size_t max_len, WalkOptions::Policy policy) {
    const StateId end_target = m1.end_target();
    std::vector<StateId> walk{start};
    StateId last = start;
    std::optional<StateId> now = sample_from_row(m1.row(start), start, rng);
    while (now && *now != end_target && walk.size() < max_len) {
        walk.push_back(*now);
        if (walk.size() >= max_len) {
            break;
        }
        const ModelChoice choice = choose(m1, *now, thresholds, policy);
        std::optional<StateId> next = sample_next(m1, m2, last, *now, choice, rng);
        last = *now;
        now = next;  // nullopt (no defined distribution) terminates the walk
    }
    return walk;
}

}  // namespace

SelectionThresholds default_thresholds(double epsilon2, StateId m) {
    if (!(epsilon2 > 0.0) || m < 1) {
        throw std::invalid_argument("default_thresholds requires epsilon2 > 0 and m >= 1");
    }
    const double theta1 = std::sqrt(2.0) / epsilon2 * static_cast<double>(m);
    // Infinite epsilon (noise disabled) puts the noise bar at zero; keep the
    // threshold positive so its invariant holds while every row clears it.
    return {std::max(theta1, std::numeric_limits<double>::min()), 5.0};
}

ModelChoice select_model(const std::vector<double>& real_state_counts,
                         const SelectionThresholds& thresholds) {
    double sum = 0.0;
    double largest = 0.0;
    double second = 0.0;
    for (double v : real_state_counts) {
        sum += v;
        if (v > largest) {
            second = largest;
            largest = v;
        } else if (v > second) {
            second = v;
        }
    }
    if (sum < thresholds.theta1) {
        return ModelChoice::UseFirstOrder;
    }
    if (second == 0.0) {
        // A sole nonzero count dominates with an infinite ratio.
        return ModelChoice::UseFirstOrder;
    }
    if (largest / second >= thresholds.theta2) {
        return ModelChoice::UseFirstOrder;
    }
    return ModelChoice::UseSecondOrder;
}

Trip sample_trip(const TripMatrix& t, Rng& rng) {
    const auto idx = sample_index(t.t, rng);
    if (!idx) {
        throw std::invalid_argument("trip matrix has no positive mass");
    }
    const StateId i = static_cast<StateId>(*idx / t.m);
    const StateId j = static_cast<StateId>(*idx % t.m);
    return {i, j};
}

std::vector<StateId> random_walk(const MarkovModel& m1, const MarkovModel& m2,
                                 const TripMatrix& trips, const SelectionThresholds& thresholds,
                                 Rng& rng, std::size_t max_len, WalkOptions::Policy policy) {
    require_walk_models(m1, m2);
    if (max_len < 1) {
        throw std::invalid_argument("max_len must be at least 1");
    }
    for (int attempt = 0; attempt < kStartResampleLimit; ++attempt) {
        const Trip trip = sample_trip(trips, rng);
        if (masked_row_sum(m1.row(trip.start), trip.start) > 0.0) {
            return walk_from(trip.start, m1, m2, thresholds, rng, max_len, policy);
        }
    }
    throw std::runtime_error("no trip start with a defined first-order row after 100 draws");
}

std::vector<StateId> random_walk_raw_start(const MarkovModel& m1, const MarkovModel& m2,
                                           const SelectionThresholds& thresholds, Rng& rng,
                                           std::size_t max_len, WalkOptions::Policy policy) {
    require_walk_models(m1, m2);
    if (max_len < 1) {
        throw std::invalid_argument("max_len must be at least 1");
    }
    const std::vector<double>& start_row = m1.row(m1.start_node());
    // Restrict to real states: a walk cannot begin at the virtual end.
    const std::vector<double> starts(start_row.begin(), start_row.begin() + m1.state_count());
    for (int attempt = 0; attempt < kStartResampleLimit; ++attempt) {
        const auto start = sample_index(starts, rng);
        if (!start) {
            break;
        }
        const StateId s = static_cast<StateId>(*start);
        if (masked_row_sum(m1.row(s), s) > 0.0) {
            return walk_from(s, m1, m2, thresholds, rng, max_len, policy);
        }
    }
    throw std::runtime_error("start row yields no state with a defined first-order row");
}

Point point_in_rect(const CellRect& rect, double u, double v) {
    return {rect.x0 + u * (rect.x1 - rect.x0), rect.y0 + v * (rect.y1 - rect.y0)};
}

Trajectory sample_locations(const std::vector<StateId>& states, const TwoLayerGrid& grid,
                            Rng& rng) {
    if (states.empty()) {
        throw std::invalid_argument("cannot sample locations for an empty state sequence");
    }
    Trajectory t;
    t.points.reserve(states.size());
    for (StateId s : states) {
        const CellRect& rect = grid.leaf_rect(s);
        t.points.push_back(point_in_rect(rect, rng.uniform01(), rng.uniform01()));
    }
    return t;
}

TrajectoryDataset generate_dataset(const MarkovModel& m1, const MarkovModel& m2,
                                   const TripMatrix& trips, const TwoLayerGrid& grid,
                                   const SelectionThresholds& thresholds,
                                   const PathLengthMatrix& lengths, const Rng& rng,
                                   const GenerateOptions& options) {
    require_walk_models(m1, m2);
    if (m1.state_count() != grid.state_count() || m2.state_count() != grid.state_count()) {
        throw std::invalid_argument("model state count does not match the grid");
    }
    std::size_t n_syn = 0;
    if (options.n_syn) {
        n_syn = *options.n_syn;
    } else if (options.raw_start_end) {
        throw std::invalid_argument("n_syn must be given in raw start/end mode");
    } else {
        n_syn = static_cast<std::size_t>(std::llround(trips.sum()));
    }
    if (n_syn == 0) {
        throw std::invalid_argument("n_syn must be at least 1");
    }
    std::size_t max_len = options.max_len;
    if (max_len == 0) {
        max_len = 10 * std::max<std::size_t>(lengths.max_nodes(), 1);
    }

    TrajectoryDataset out;
    out.bbox = grid.bbox();
    out.trajectories.reserve(n_syn);
    for (std::size_t i = 0; i < n_syn; ++i) {
        Rng traj_rng = rng.substream(static_cast<std::uint64_t>(i));
        const std::vector<StateId> states =
            options.raw_start_end
                ? random_walk_raw_start(m1, m2, thresholds, traj_rng, max_len, options.policy)
                : random_walk(m1, m2, trips, thresholds, traj_rng, max_len, options.policy);
        out.trajectories.push_back(sample_locations(states, grid, traj_rng));
    }
    return out;
}

}  // namespace dptraj
