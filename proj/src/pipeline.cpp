#include "dptraj/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <future>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "dptraj/dataset_io.hpp"
#include "dptraj/generation.hpp"
#include "dptraj/grid.hpp"
#include "dptraj/markov.hpp"
#include "dptraj/rng.hpp"
#include "dptraj/synthgen.hpp"
#include "dptraj/trip.hpp"

namespace dptraj {

namespace {

using nlohmann::json;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json budget_json(const PrivacyBudget& budget) {
    const auto value = [](double eps) -> json {
        return std::isinf(eps) ? json("inf") : json(eps);
    };
    return {{"total", value(budget.epsilon_total)},
            {"epsilon1", value(budget.epsilon1)},
            {"epsilon2", value(budget.epsilon2)},
            {"epsilon3", value(budget.epsilon3)}};
}

json report_json(const MetricReport& report) {
    return json::parse(report.to_json());
}

PrivacyBudget resolve_budget(const RunConfig& config) {
    if (config.noise_disabled) {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf, inf, inf};
    }
    return split_budget(config.epsilon_total, config.budget_ratios);
}

WalkOptions::Policy walk_policy(ModelPolicy model) {
    switch (model) {
        case ModelPolicy::FirstOrder:
            return WalkOptions::Policy::FirstOrderOnly;
        case ModelPolicy::SecondOrder:
            return WalkOptions::Policy::SecondOrderOnly;
        case ModelPolicy::Adaptive:
            break;
    }
    return WalkOptions::Policy::Adaptive;
}

}  // namespace

TrajectoryDataset load_input(const RunConfig& config) {
    if (!config.input_path.empty()) {
        TrajectoryDataset d = read_dataset_file(config.input_path);
        validate_dataset(d);
        return d;
    }
    const ToyWorldSpec spec = builtin_world(config.builtin);
    const Rng rng = Rng(config.seed).substream("toy-world");
    return generate_toy_dataset(spec, rng);
}

RepetitionResult run_single_repetition(const RunConfig& config, const TrajectoryDataset& input,
                                       int rep_index) {
    const PrivacyBudget budget = resolve_budget(config);
    const Rng rep_rng =
        Rng(config.seed).substream("rep").substream(static_cast<std::uint64_t>(rep_index));

    // Stage 1: discretization.
    const int k = config.k ? *config.k : choose_first_layer_k(input.size(), config.c);
    Rng rng_disc = rep_rng.substream("discretization");
    // Without second-layer states the noisy densities still get measured (the
    // budget split is fixed); the expansion is simply not applied.
    const double pop = config.second_layer_states ? config.pop : 0.0;
    TwoLayerGridResult grid_result =
        build_two_layer_grid(input, k, budget.epsilon1, pop, config.kappa_denom, rng_disc);
    const TwoLayerGrid& grid = grid_result.grid;
    const StateId m = grid.state_count();

    // Stage 2: model learning.
    std::vector<AugmentedSequence> sequences;
    sequences.reserve(input.size());
    for (const Trajectory& t : input.trajectories) {
        sequences.push_back(augment(trajectory_to_states(t, grid)));
    }
    Rng rng_m1 = rep_rng.substream("model-1");
    Rng rng_m2 = rep_rng.substream("model-2");
    const MarkovModel m1 =
        apply_normcut(add_model_noise(count_transitions(sequences, 1, m), budget.epsilon2, rng_m1));
    const MarkovModel m2 = apply_normcut(add_model_noise(count_transitions(sequences, 2, m),
                                                         budget.epsilon3, rng_m2,
                                                         config.dense_order2));
    sequences.clear();
    sequences.shrink_to_fit();

    SelectionThresholds thresholds = default_thresholds(budget.epsilon2, m);
    if (config.theta1) {
        thresholds.theta1 = *config.theta1;
    }
    thresholds.theta2 = config.theta2;

    // Stage 2b: trip distribution (post-processing of the noisy model).
    const StateGraph graph = build_state_graph(grid);
    const PathLengthMatrix lengths = shortest_path_lengths(graph);
    TripMatrix trips;
    const bool raw_start_end = config.trip_estimation == TripEstimation::RawStartEnd;
    if (!raw_start_end) {
        const std::vector<double>& start_row = m1.row(m1.start_node());
        std::vector<double> b(start_row.begin(), start_row.begin() + m);
        std::vector<double> q(m);
        for (StateId j = 0; j < m; ++j) {
            q[j] = m1.row(j)[m1.end_target()];
        }
        trips = estimate_trip_distribution(b, q, lengths, static_cast<double>(input.size()));
    }

    // Stage 3: generation.
    GenerateOptions gen;
    gen.policy = walk_policy(config.model);
    gen.raw_start_end = raw_start_end;
    gen.max_len = config.max_len ? *config.max_len : 0;
    if (config.n_syn) {
        gen.n_syn = *config.n_syn;
    } else if (raw_start_end) {
        gen.n_syn = input.size();
    }
    const Rng rng_gen = rep_rng.substream("generation");
    RepetitionResult result;
    result.synthetic = generate_dataset(m1, m2, trips, grid, thresholds, lengths, rng_gen, gen);

    // Scoring (evaluation only; reads the raw input by design).
    Rng rng_metrics = rep_rng.substream("metrics");
    result.metrics = evaluate_metrics(input, result.synthetic, config.metrics, rng_metrics);

    result.state_count = m;
    result.first_layer_k = k;
    result.expanded_cells = grid.expanded_cell_count();
    if (config.write_diagnostics) {
        result.grid_dump = grid.describe();
        result.model1_dump = m1.describe();
        result.model2_dump = m2.describe();
        result.trips_csv = trips.m > 0 ? trips.to_csv() : std::string();
    }
    if (config.heatmap) {
        result.heatmap_original = density_heatmap_csv(input, 80);
        result.heatmap_synthetic = density_heatmap_csv(result.synthetic, 80);
    }
    return result;
}

std::string ExperimentResult::to_json(const RunConfig& config) const {
    json j;
    j["config_hash"] = config_hash;
    j["config"] = json::parse(config_to_json(config));
    j["seed"] = config.seed;
    j["epsilon"] = budget_json(budget);
    j["noise_disabled"] = noise_disabled;
    j["repetitions"] = per_repetition.size();
    json reps = json::array();
    for (const MetricReport& report : per_repetition) {
        reps.push_back(report_json(report));
    }
    j["per_repetition"] = reps;
    j["mean"] = report_json(mean);
    j["stddev"] = report_json(stddev);
    j["grid"] = {{"m", state_count},
                 {"first_layer_k", first_layer_k},
                 {"expanded_cells", expanded_cells}};
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    return j.dump(2) + "\n";
}

ExperimentResult run_pipeline(const RunConfig& config) {
    const std::vector<std::string> diagnostics = validate_config(config);
    if (!diagnostics.empty()) {
        std::string joined = "invalid config:";
        for (const std::string& d : diagnostics) {
            joined += "\n  - " + d;
        }
        throw std::invalid_argument(joined);
    }

    ExperimentResult result;
    result.started_at = iso_timestamp();
    result.config_hash = config_hash(config);
    result.budget = resolve_budget(config);
    result.noise_disabled = config.noise_disabled;

    const TrajectoryDataset input = load_input(config);
    validate_dataset(input);

    std::vector<std::future<RepetitionResult>> futures;
    futures.reserve(config.repetitions);
    for (int rep = 0; rep < config.repetitions; ++rep) {
        futures.push_back(std::async(std::launch::async, [&config, &input, rep] {
            return run_single_repetition(config, input, rep);
        }));
    }

    namespace fs = std::filesystem;
    const fs::path base = fs::path(config.out_dir) / result.config_hash;
    std::vector<RepetitionResult> reps;
    reps.reserve(config.repetitions);
    for (int rep = 0; rep < config.repetitions; ++rep) {
        reps.push_back(futures[rep].get());
        const RepetitionResult& r = reps.back();
        const fs::path dir = base / ("rep" + std::to_string(rep));
        write_dataset_file((dir / "synthetic.txt").string(), r.synthetic);
        write_text_file((dir / "metrics.json").string(), r.metrics.to_json());
        if (config.write_diagnostics) {
            write_text_file((dir / "grid.txt").string(), r.grid_dump);
            write_text_file((dir / "model1.txt").string(), r.model1_dump);
            write_text_file((dir / "model2.txt").string(), r.model2_dump);
            if (!r.trips_csv.empty()) {
                write_text_file((dir / "trips.csv").string(), r.trips_csv);
            }
        }
        if (config.heatmap) {
            write_text_file((dir / "heatmap_original.csv").string(), r.heatmap_original);
            write_text_file((dir / "heatmap_synthetic.csv").string(), r.heatmap_synthetic);
        }
        result.per_repetition.push_back(r.metrics);
    }

    result.state_count = reps.front().state_count;
    result.first_layer_k = reps.front().first_layer_k;
    result.expanded_cells = reps.front().expanded_cells;

    // Mean and population standard deviation per metric.
    const auto aggregate = [&](auto member) {
        double mean = 0.0;
        for (const MetricReport& r : result.per_repetition) {
            mean += r.*member;
        }
        mean /= static_cast<double>(result.per_repetition.size());
        double var = 0.0;
        for (const MetricReport& r : result.per_repetition) {
            const double d = r.*member - mean;
            var += d * d;
        }
        var /= static_cast<double>(result.per_repetition.size());
        return std::pair<double, double>(mean, std::sqrt(var));
    };
    result.mean = result.per_repetition.front();
    result.stddev = result.per_repetition.front();
    std::tie(result.mean.length_jsd, result.stddev.length_jsd) =
        aggregate(&MetricReport::length_jsd);
    std::tie(result.mean.diameter_jsd, result.stddev.diameter_jsd) =
        aggregate(&MetricReport::diameter_jsd);
    std::tie(result.mean.density_are, result.stddev.density_are) =
        aggregate(&MetricReport::density_are);
    std::tie(result.mean.pattern_are, result.stddev.pattern_are) =
        aggregate(&MetricReport::pattern_are);

    result.finished_at = iso_timestamp();
    write_text_file((base / "experiment.json").string(), result.to_json(config));
    return result;
}

}  // namespace dptraj
