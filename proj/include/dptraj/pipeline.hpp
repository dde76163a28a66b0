#pragma once

#include <string>
#include <vector>

#include "dptraj/budget.hpp"
#include "dptraj/config.hpp"
#include "dptraj/grid.hpp"
#include "dptraj/metrics.hpp"
#include "dptraj/trajectory.hpp"

namespace dptraj {

/// One repetition's in-memory outcome. The dump strings are filled only
/// when the config asks for diagnostics or heatmaps.
struct RepetitionResult {
    TrajectoryDataset synthetic;
    MetricReport metrics;
    StateId state_count = 0;
    int first_layer_k = 0;
    std::size_t expanded_cells = 0;
    std::string grid_dump;
    std::string model1_dump;
    std::string model2_dump;
    std::string trips_csv;
    std::string heatmap_original;
    std::string heatmap_synthetic;
};

/// Aggregated outcome across repetitions.
struct ExperimentResult {
    std::string config_hash;
    PrivacyBudget budget;
    bool noise_disabled = false;
    std::vector<MetricReport> per_repetition;
    MetricReport mean;
    MetricReport stddev;
    StateId state_count = 0;
    int first_layer_k = 0;
    std::size_t expanded_cells = 0;
    std::string started_at;
    std::string finished_at;

    std::string to_json(const RunConfig& config) const;
};

/// Runs discretize -> learn -> estimate trips -> generate -> score for one
/// repetition. rep_index selects the repetition's rng substream.
RepetitionResult run_single_repetition(const RunConfig& config, const TrajectoryDataset& input,
                                       int rep_index);

/// Full experiment: loads the input (file or builtin world), runs every
/// repetition concurrently on independent substreams, writes
/// out/<config-hash>/rep<k>/{synthetic.txt,metrics.json,...} and
/// out/<config-hash>/experiment.json atomically, and returns the aggregate.
/// Throws std::invalid_argument for config errors (including a
/// noise-disabled run without the unsafe flag) and std::runtime_error for
/// I/O or runtime failures.
ExperimentResult run_pipeline(const RunConfig& config);

/// Input loading shared with the CLI: reads input_path or builds the
/// builtin world deterministically from the config seed.
TrajectoryDataset load_input(const RunConfig& config);

}  // namespace dptraj
