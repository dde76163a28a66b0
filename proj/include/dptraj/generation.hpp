#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dptraj/grid.hpp"
#include "dptraj/markov.hpp"
#include "dptraj/rng.hpp"
#include "dptraj/trip.hpp"

namespace dptraj {

enum class ModelChoice { UseFirstOrder, UseSecondOrder };

/// Adaptive model-selection thresholds: theta1 compares a row's total count
/// against the expected noise mass, theta2 is the dominance ratio between
/// the two largest counts.
struct SelectionThresholds {
    double theta1 = 0.0;  // > 0
    double theta2 = 5.0;  // > 1
};

/// theta1 = (sqrt(2) / epsilon2) * m — the noise standard deviation summed
/// over a row of m states; theta2 = 5.
SelectionThresholds default_thresholds(double epsilon2, StateId m);

/// Decides which model predicts the next step, from the current state's
/// noisy first-order counts over real next states (END excluded):
/// below theta1 the row is noise-dominated (first order); otherwise a
/// dominant largest count (ratio >= theta2, or a zero runner-up) keeps the
/// first order; otherwise the second order is worth its extra noise.
ModelChoice select_model(const std::vector<double>& real_state_counts,
                         const SelectionThresholds& thresholds);

/// Samples a (start, end) pair with probability t_ij / sum(t). The end state
/// is diagnostic only; the walk never steers toward it. Throws
/// std::invalid_argument when the matrix sums to zero.
struct Trip {
    StateId start;
    StateId end;
};
Trip sample_trip(const TripMatrix& t, Rng& rng);

struct WalkOptions {
    std::size_t max_len = 0;  // 0: derive as 10 * longest shortest path
    // Ablation switches: force one model, or adapt per step.
    enum class Policy { Adaptive, FirstOrderOnly, SecondOrderOnly } policy = Policy::Adaptive;
};

/// One random walk: the start state comes from the trip matrix, every later
/// state from the first- or second-order model chosen per step. Stops when
/// the virtual end is drawn, when max_len states have been emitted, or when
/// no defined distribution remains. Returns real states only.
/// Throws std::runtime_error if no usable start is found in 100 trip draws.
std::vector<StateId> random_walk(const MarkovModel& m1, const MarkovModel& m2,
                                 const TripMatrix& trips, const SelectionThresholds& thresholds,
                                 Rng& rng, std::size_t max_len,
                                 WalkOptions::Policy policy = WalkOptions::Policy::Adaptive);

/// Variant without a trip matrix: the start state is sampled from the noisy
/// first-order start row restricted to real states (the raw start/end
/// ablation).
std::vector<StateId> random_walk_raw_start(const MarkovModel& m1, const MarkovModel& m2,
                                           const SelectionThresholds& thresholds, Rng& rng,
                                           std::size_t max_len,
                                           WalkOptions::Policy policy);

/// Point at the given uniform quantiles of a rectangle.
Point point_in_rect(const CellRect& rect, double u, double v);

/// One uniform point inside each state's leaf rectangle.
Trajectory sample_locations(const std::vector<StateId>& states, const TwoLayerGrid& grid,
                            Rng& rng);

struct GenerateOptions {
    std::optional<std::size_t> n_syn;  // default: round(sum t)
    std::size_t max_len = 0;           // 0: 10 * longest shortest path
    WalkOptions::Policy policy = WalkOptions::Policy::Adaptive;
    bool raw_start_end = false;  // skip the trip matrix, walk from the start row
};

/// Generates n_syn independent trajectories. Models must be noised and
/// normcut; raw counts are not reachable from here. Each trajectory draws
/// from its own indexed substream, so generation parallelizes per
/// trajectory without perturbing the stream.
TrajectoryDataset generate_dataset(const MarkovModel& m1, const MarkovModel& m2,
                                   const TripMatrix& trips, const TwoLayerGrid& grid,
                                   const SelectionThresholds& thresholds,
                                   const PathLengthMatrix& lengths, const Rng& rng,
                                   const GenerateOptions& options = {});

}  // namespace dptraj
