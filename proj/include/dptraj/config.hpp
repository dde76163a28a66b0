#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dptraj/metrics.hpp"

namespace dptraj {

enum class ModelPolicy { FirstOrder, SecondOrder, Adaptive };
enum class TripEstimation { Optimized, RawStartEnd };

/// Everything one experiment needs. Defaults follow the reference parameter
/// settings, so a config naming only an input runs the full method.
struct RunConfig {
    // Input: exactly one of the two.
    std::string input_path;
    std::string builtin;

    double epsilon_total = 1.0;
    std::array<double, 3> budget_ratios = {0.2, 0.4, 0.4};

    double c = 1200.0;          // first-layer K = round(sqrt(|D| / c))
    std::optional<int> k;       // explicit K override
    double pop = 0.0;           // area population; required (> 0)
    double kappa_denom = 2e7;

    std::optional<double> theta1;  // default: (sqrt(2)/epsilon2) * m
    double theta2 = 5.0;

    std::optional<std::size_t> n_syn;    // default: round(sum t)
    std::optional<std::size_t> max_len;  // default: 10 * longest shortest path
    std::uint64_t seed = 1;
    int repetitions = 10;

    MetricParams metrics;
    bool heatmap = false;  // 80x80 density CSV per repetition

    // Ablation switches.
    ModelPolicy model = ModelPolicy::Adaptive;
    bool second_layer_states = true;
    TripEstimation trip_estimation = TripEstimation::Optimized;

    bool dense_order2 = false;
    bool noise_disabled = false;
    bool unsafe_no_dp = false;  // required to actually run with noise_disabled
    bool write_diagnostics = false;

    std::string out_dir = "out";
};

/// Parses a config JSON document. Unknown keys are diagnosed by
/// validate_config; type errors throw std::invalid_argument.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

/// All violations found, empty when valid. Never mutates.
std::vector<std::string> validate_config(const RunConfig& config);

/// Canonical JSON form (sorted keys, resolved values); hashing this gives
/// the config hash used for output directories.
std::string config_to_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

/// Applies one of the five ablation presets:
///   1 first-order only          (no second layer, raw start/end)
///   2 second-order only         (no second layer, raw start/end)
///   3 adaptive                  (no second layer, raw start/end)
///   4 adaptive + second layer   (raw start/end)
///   5 full method
void apply_ablation_preset(RunConfig& config, int preset);

}  // namespace dptraj
