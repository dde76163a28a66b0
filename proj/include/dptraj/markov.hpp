#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dptraj/grid.hpp"
#include "dptraj/rng.hpp"

namespace dptraj {

// Virtual start/end sentinels used in augmented sequences.
inline constexpr StateId kStartToken = 0xFFFFFFFEu;
inline constexpr StateId kEndToken = 0xFFFFFFFFu;

/// State sequence framed by the virtual start and end tokens:
/// (START, s_1, ..., s_n, END) with n >= 1 and no consecutive duplicate
/// real states. |T| — the normalization length — is tokens.size().
struct AugmentedSequence {
    std::vector<StateId> tokens;

    std::size_t length() const { return tokens.size(); }
};

/// Prepends START and appends END. Throws std::invalid_argument on an empty
/// sequence, a consecutive duplicate, or a reserved token value.
AugmentedSequence augment(const std::vector<StateId>& states);

/// Transition-count tables for a first- or second-order chain over m real
/// states plus the virtual start/end.
///
/// Contexts are nodes 0..m-1 (real states) and m (START); targets are
/// 0..m-1 and m (END). A context never ends in END. Counts are
/// length-normalized: each (k+1)-window of an augmented sequence T adds
/// 1/|T|, so one sequence contributes (|T|-k)/|T| < 1 in total.
///
/// Order-1 tables are dense ((m+1) x (m+1)). Order-2 rows exist only for
/// observed contexts unless noise is added in dense mode. Counts (not
/// probabilities) are stored; rows normalize lazily at query time.
class MarkovModel {
public:
    MarkovModel(int order, StateId state_count);

    int order() const { return order_; }
    StateId state_count() const { return m_; }
    bool noised() const { return noised_; }
    bool normcut_applied() const { return normcut_applied_; }

    /// Context node id of the virtual start.
    StateId start_node() const { return m_; }
    /// Target index of the virtual end within a row.
    StateId end_target() const { return m_; }

    /// Order-1 row for a context node (real state or start_node()).
    const std::vector<double>& row(StateId context) const;

    /// Order-2 row for (prev, cur); nullptr when the context is absent.
    const std::vector<double>* row2(StateId prev, StateId cur) const;

    /// Sorted (prev, cur) keys of materialized order-2 rows.
    std::vector<std::pair<StateId, StateId>> context_keys() const;

    /// L1 norm of the full count table (used by sensitivity checks).
    double l1_norm() const;
    /// L1 distance between two models of identical shape.
    static double l1_distance(const MarkovModel& a, const MarkovModel& b);

    /// Deterministic "context -> target: count" dump.
    std::string describe() const;

    // Builders below; not for use after noising.
    void add_count(StateId context, StateId target, double value);
    void add_count2(StateId prev, StateId cur, StateId target, double value);

    friend MarkovModel add_model_noise(const MarkovModel& model, double epsilon, Rng& rng,
                                       bool dense_order2);
    friend MarkovModel apply_normcut(const MarkovModel& model);

private:
    std::vector<double>& row_mut(StateId context);
    std::uint64_t key2(StateId prev, StateId cur) const;

    int order_;
    StateId m_;
    bool noised_ = false;
    bool normcut_applied_ = false;
    std::vector<std::vector<double>> rows1_;               // order 1, dense
    std::map<std::uint64_t, std::vector<double>> rows2_;   // order 2, sparse
};

/// Counts all length-(order+1) windows of the given sequences, each weighted
/// by 1/|T|. order must be 1 or 2; real state ids must be < state_count.
MarkovModel count_transitions(const std::vector<AugmentedSequence>& sequences, int order,
                              StateId state_count);

/// Adds independent Laplace(1/epsilon) noise to every materialized entry
/// (the normalized count table has unit L1 sensitivity). Order 1 noises the
/// full dense domain. Order 2 noises observed contexts only, unless
/// dense_order2 materializes every (prev, cur) context first — faithful but
/// cubic in m, so reserved for small state counts. epsilon = +infinity
/// disables the noise while still marking the model as noised.
/// Throws std::logic_error if the model is already noised.
MarkovModel add_model_noise(const MarkovModel& model, double epsilon, Rng& rng,
                            bool dense_order2 = false);

/// The negative-mass removal step applied to one row: the negative total is
/// absorbed into the smallest positive entries (ties to the lowest index),
/// then remaining negatives are zeroed. Output is entrywise >= 0 and, when
/// the input sum is positive, preserves it.
std::vector<double> normcut(std::vector<double> row);

/// normcut applied to every stored row; marks the model accordingly.
MarkovModel apply_normcut(const MarkovModel& model);

/// Row normalized to a probability vector over targets (real states then
/// END). Undefined — nullopt — when the context is absent or the row sums
/// to zero; callers decide the fallback. Requires a noised, normcut model.
std::optional<std::vector<double>> transition_distribution(const MarkovModel& model,
                                                           StateId context);
std::optional<std::vector<double>> transition_distribution(const MarkovModel& model,
                                                           StateId prev, StateId cur);

}  // namespace dptraj
