// Command-line front end: end-to-end runs, toy-data generation, metric
// scoring, and config validation. Exit codes: 0 success, 2 config error,
// 3 runtime error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dptraj/config.hpp"
#include "dptraj/dataset_io.hpp"
#include "dptraj/metrics.hpp"
#include "dptraj/pipeline.hpp"
#include "dptraj/rng.hpp"
#include "dptraj/synthgen.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon_total;
    std::optional<int> repetitions;
    std::optional<std::size_t> n_syn;
    std::optional<std::size_t> max_len;
    std::optional<double> pop;
    std::optional<double> c;
    std::optional<int> k;
    std::optional<double> kappa_denom;
    std::optional<double> theta1;
    std::optional<double> theta2;
    std::optional<std::string> model;
    std::optional<std::string> trip_estimation;
    std::optional<bool> second_layer;
    std::optional<int> ablation;
    std::optional<std::string> out_dir;
    std::optional<int> metric_bins;
    std::optional<int> metric_queries;
    std::optional<int> metric_mu;
    std::optional<double> metric_phi;
    std::optional<int> metric_pattern_grid;
    std::optional<double> radius_min;
    std::optional<double> radius_max;
    bool noise_disabled = false;
    bool unsafe_no_dp = false;
    bool heatmap = false;
    bool diagnostics = false;
    bool dense_order2 = false;
};

void apply_overrides(dptraj::RunConfig& config, const RunOverrides& o) {
    if (o.ablation) {
        dptraj::apply_ablation_preset(config, *o.ablation);
    }
    if (o.seed) config.seed = *o.seed;
    if (o.epsilon_total) config.epsilon_total = *o.epsilon_total;
    if (o.repetitions) config.repetitions = *o.repetitions;
    if (o.n_syn) config.n_syn = *o.n_syn;
    if (o.max_len) config.max_len = *o.max_len;
    if (o.pop) config.pop = *o.pop;
    if (o.c) config.c = *o.c;
    if (o.k) config.k = *o.k;
    if (o.kappa_denom) config.kappa_denom = *o.kappa_denom;
    if (o.theta1) config.theta1 = *o.theta1;
    if (o.theta2) config.theta2 = *o.theta2;
    if (o.model == "first") config.model = dptraj::ModelPolicy::FirstOrder;
    if (o.model == "second") config.model = dptraj::ModelPolicy::SecondOrder;
    if (o.model == "adaptive") config.model = dptraj::ModelPolicy::Adaptive;
    if (o.trip_estimation == "optimized") {
        config.trip_estimation = dptraj::TripEstimation::Optimized;
    }
    if (o.trip_estimation == "raw_start_end") {
        config.trip_estimation = dptraj::TripEstimation::RawStartEnd;
    }
    if (o.second_layer) config.second_layer_states = *o.second_layer;
    if (o.out_dir) config.out_dir = *o.out_dir;
    if (o.metric_bins) config.metrics.bins = *o.metric_bins;
    if (o.metric_queries) config.metrics.density_queries = *o.metric_queries;
    if (o.metric_mu) config.metrics.pattern_mu = *o.metric_mu;
    if (o.metric_phi) config.metrics.phi = *o.metric_phi;
    if (o.metric_pattern_grid) config.metrics.pattern_grid = *o.metric_pattern_grid;
    if (o.radius_min) config.metrics.radius_min_frac = *o.radius_min;
    if (o.radius_max) config.metrics.radius_max_frac = *o.radius_max;
    if (o.noise_disabled) config.noise_disabled = true;
    if (o.unsafe_no_dp) config.unsafe_no_dp = true;
    if (o.heatmap) config.heatmap = true;
    if (o.diagnostics) config.write_diagnostics = true;
    if (o.dense_order2) config.dense_order2 = true;
}

int cmd_run(const std::string& config_path, const RunOverrides& overrides) {
    dptraj::RunConfig config = dptraj::load_config_file(config_path);
    apply_overrides(config, overrides);
    const auto diagnostics = dptraj::validate_config(config);
    if (!diagnostics.empty()) {
        for (const auto& d : diagnostics) {
            std::cerr << "config error: " << d << "\n";
        }
        return kExitConfig;
    }
    const dptraj::ExperimentResult result = dptraj::run_pipeline(config);
    const std::string base = config.out_dir + "/" + result.config_hash;
    std::cout << "wrote " << base << "/experiment.json\n";
    std::printf("epsilon: total=%s (e1+e2+e3 conserved: %s)\n",
                result.noise_disabled ? "inf" : std::to_string(result.budget.epsilon_total).c_str(),
                result.budget.conserved() ? "yes" : "NO");
    std::printf("grid: K=%d, m=%u states, %zu expanded cells\n", result.first_layer_k,
                result.state_count, result.expanded_cells);
    std::printf("mean over %zu repetitions:\n", result.per_repetition.size());
    std::printf("  length_jsd   %.6f (sd %.6f)\n", result.mean.length_jsd,
                result.stddev.length_jsd);
    std::printf("  diameter_jsd %.6f (sd %.6f)\n", result.mean.diameter_jsd,
                result.stddev.diameter_jsd);
    std::printf("  density_are  %.6f (sd %.6f)\n", result.mean.density_are,
                result.stddev.density_are);
    std::printf("  pattern_are  %.6f (sd %.6f)\n", result.mean.pattern_are,
                result.stddev.pattern_are);
    return kExitOk;
}

int cmd_gen_toy(const std::string& world, const std::string& out_path, std::uint64_t seed,
                std::optional<std::size_t> n) {
    dptraj::ToyWorldSpec spec = dptraj::builtin_world(world);
    if (n) {
        spec.n_trajectories = *n;
    }
    const dptraj::TrajectoryDataset d =
        dptraj::generate_toy_dataset(spec, dptraj::Rng(seed).substream("toy-world"));
    dptraj::write_dataset_file(out_path, d);
    std::cout << "wrote " << out_path << " (" << d.size() << " trajectories)\n";
    return kExitOk;
}

int cmd_metrics(const std::string& orig_path, const std::string& synth_path,
                const dptraj::MetricParams& params, std::uint64_t seed,
                const std::string& out_path, const std::string& heatmap_prefix) {
    dptraj::TrajectoryDataset d_o = dptraj::read_dataset_file(orig_path);
    dptraj::TrajectoryDataset d_s = dptraj::read_dataset_file(synth_path);
    // File-loaded boxes are tight hulls; score both on their union.
    dptraj::BoundingBox box = d_o.bbox;
    box.xmin = std::min(box.xmin, d_s.bbox.xmin);
    box.ymin = std::min(box.ymin, d_s.bbox.ymin);
    box.xmax = std::max(box.xmax, d_s.bbox.xmax);
    box.ymax = std::max(box.ymax, d_s.bbox.ymax);
    d_o.bbox = box;
    d_s.bbox = box;
    dptraj::Rng rng = dptraj::Rng(seed).substream("metrics");
    const dptraj::MetricReport report = dptraj::evaluate_metrics(d_o, d_s, params, rng);
    if (out_path.empty()) {
        std::cout << report.to_json();
    } else {
        dptraj::write_text_file(out_path, report.to_json());
        std::cout << "wrote " << out_path << "\n";
    }
    if (!heatmap_prefix.empty()) {
        dptraj::write_text_file(heatmap_prefix + "_original.csv",
                                dptraj::density_heatmap_csv(d_o, 80));
        dptraj::write_text_file(heatmap_prefix + "_synthetic.csv",
                                dptraj::density_heatmap_csv(d_s, 80));
    }
    return kExitOk;
}

int cmd_validate(const std::string& config_path) {
    const dptraj::RunConfig config = dptraj::load_config_file(config_path);
    const auto diagnostics = dptraj::validate_config(config);
    if (diagnostics.empty()) {
        std::cout << "config ok\n";
        return kExitOk;
    }
    for (const auto& d : diagnostics) {
        std::cout << d << "\n";
    }
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differentially private trajectory synthesis"};
    app.require_subcommand(1);

    std::string config_path;
    RunOverrides overrides;
    CLI::App* run = app.add_subcommand("run", "Run the full pipeline from a config file");
    run->add_option("config", config_path, "Config JSON path")->required();
    run->add_option("--seed", overrides.seed);
    run->add_option("--epsilon-total", overrides.epsilon_total);
    run->add_option("--repetitions", overrides.repetitions);
    run->add_option("--n-syn", overrides.n_syn);
    run->add_option("--max-len", overrides.max_len);
    run->add_option("--pop", overrides.pop);
    run->add_option("--c", overrides.c);
    run->add_option("--k", overrides.k);
    run->add_option("--kappa-denom", overrides.kappa_denom);
    run->add_option("--theta1", overrides.theta1);
    run->add_option("--theta2", overrides.theta2);
    run->add_option("--model", overrides.model)
        ->check(CLI::IsMember({"first", "second", "adaptive"}));
    run->add_option("--trip-estimation", overrides.trip_estimation)
        ->check(CLI::IsMember({"optimized", "raw_start_end"}));
    run->add_option("--second-layer-states", overrides.second_layer);
    run->add_option("--ablation", overrides.ablation)->check(CLI::Range(1, 5));
    run->add_option("--out-dir", overrides.out_dir);
    run->add_option("--bins", overrides.metric_bins);
    run->add_option("--queries", overrides.metric_queries);
    run->add_option("--mu", overrides.metric_mu);
    run->add_option("--phi", overrides.metric_phi);
    run->add_option("--pattern-grid", overrides.metric_pattern_grid);
    run->add_option("--radius-min", overrides.radius_min);
    run->add_option("--radius-max", overrides.radius_max);
    run->add_flag("--noise-disabled", overrides.noise_disabled);
    run->add_flag("--unsafe-no-dp", overrides.unsafe_no_dp);
    run->add_flag("--heatmap", overrides.heatmap);
    run->add_flag("--diagnostics", overrides.diagnostics);
    run->add_flag("--dense-order2", overrides.dense_order2);

    std::string world;
    std::string toy_out;
    std::uint64_t toy_seed = 1;
    std::optional<std::size_t> toy_n;
    CLI::App* gen_toy = app.add_subcommand("gen-toy", "Write a builtin toy dataset");
    gen_toy->add_option("world", world, "corridor|two_cluster|ring|second_order")->required();
    gen_toy->add_option("out", toy_out, "Output dataset path")->required();
    gen_toy->add_option("--seed", toy_seed);
    gen_toy->add_option("--n", toy_n, "Override trajectory count");

    std::string orig_path;
    std::string synth_path;
    std::string metrics_out;
    std::string heatmap_prefix;
    std::uint64_t metrics_seed = 1;
    dptraj::MetricParams params;
    CLI::App* metrics = app.add_subcommand("metrics", "Score a synthetic dataset");
    metrics->add_option("original", orig_path)->required();
    metrics->add_option("synthetic", synth_path)->required();
    metrics->add_option("--bins", params.bins);
    metrics->add_option("--queries", params.density_queries);
    metrics->add_option("--mu", params.pattern_mu);
    metrics->add_option("--phi", params.phi);
    metrics->add_option("--pattern-grid", params.pattern_grid);
    metrics->add_option("--radius-min", params.radius_min_frac);
    metrics->add_option("--radius-max", params.radius_max_frac);
    metrics->add_option("--seed", metrics_seed);
    metrics->add_option("--out", metrics_out, "Write the report here instead of stdout");
    metrics->add_option("--heatmap-prefix", heatmap_prefix,
                        "Also write <prefix>_{original,synthetic}.csv 80x80 heatmaps");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "Check a config file");
    validate->add_option("config", validate_path, "Config JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config_path, overrides);
        }
        if (gen_toy->parsed()) {
            return cmd_gen_toy(world, toy_out, toy_seed, toy_n);
        }
        if (metrics->parsed()) {
            return cmd_metrics(orig_path, synth_path, params, metrics_seed, metrics_out,
                               heatmap_prefix);
        }
        if (validate->parsed()) {
            return cmd_validate(validate_path);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
