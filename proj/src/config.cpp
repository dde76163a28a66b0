#include "dptraj/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dptraj/synthgen.hpp"

namespace dptraj {

namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& message) {
    throw std::invalid_argument("config: " + message);
}

void check_known_keys(const json& obj, const std::set<std::string>& known,
                      const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (known.find(key) == known.end()) {
            bad_config("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read_value(const json& obj, const char* key, T& out) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return;
    }
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        bad_config(std::string("key '") + key + "' has the wrong type");
    }
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& out) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return;
    }
    T value{};
    read_value(obj, key, value);
    out = value;
}

std::string model_policy_name(ModelPolicy policy) {
    switch (policy) {
        case ModelPolicy::FirstOrder:
            return "first";
        case ModelPolicy::SecondOrder:
            return "second";
        case ModelPolicy::Adaptive:
            break;
    }
    return "adaptive";
}

ModelPolicy parse_model_policy(const std::string& name) {
    if (name == "first") {
        return ModelPolicy::FirstOrder;
    }
    if (name == "second") {
        return ModelPolicy::SecondOrder;
    }
    if (name == "adaptive") {
        return ModelPolicy::Adaptive;
    }
    bad_config("model must be one of first|second|adaptive");
}

std::string trip_estimation_name(TripEstimation mode) {
    return mode == TripEstimation::Optimized ? "optimized" : "raw_start_end";
}

TripEstimation parse_trip_estimation(const std::string& name) {
    if (name == "optimized") {
        return TripEstimation::Optimized;
    }
    if (name == "raw_start_end") {
        return TripEstimation::RawStartEnd;
    }
    bad_config("trip_estimation must be optimized|raw_start_end");
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        bad_config(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        bad_config("top level must be a JSON object");
    }
    check_known_keys(doc,
                     {"input", "builtin", "epsilon_total", "budget_ratios", "c", "k", "pop",
                      "kappa_denom", "theta1", "theta2", "n_syn", "max_len", "seed",
                      "repetitions", "metrics", "heatmap", "model", "second_layer_states",
                      "trip_estimation", "dense_order2", "noise_disabled", "unsafe_no_dp",
                      "write_diagnostics", "out_dir", "ablation"},
                     "config");

    RunConfig config;
    read_value(doc, "input", config.input_path);
    read_value(doc, "builtin", config.builtin);
    read_value(doc, "epsilon_total", config.epsilon_total);
    if (const auto it = doc.find("budget_ratios"); it != doc.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 3) {
            bad_config("budget_ratios must be an array of three numbers");
        }
        for (std::size_t i = 0; i < 3; ++i) {
            if (!(*it)[i].is_number()) {
                bad_config("budget_ratios must be an array of three numbers");
            }
            config.budget_ratios[i] = (*it)[i].get<double>();
        }
    }
    read_value(doc, "c", config.c);
    read_optional(doc, "k", config.k);
    read_value(doc, "pop", config.pop);
    read_value(doc, "kappa_denom", config.kappa_denom);
    read_optional(doc, "theta1", config.theta1);
    read_value(doc, "theta2", config.theta2);
    read_optional(doc, "n_syn", config.n_syn);
    read_optional(doc, "max_len", config.max_len);
    read_value(doc, "seed", config.seed);
    read_value(doc, "repetitions", config.repetitions);

    if (const auto it = doc.find("metrics"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) {
            bad_config("metrics must be an object");
        }
        check_known_keys(*it, {"bins", "queries", "mu", "phi", "pattern_grid", "radius_range"},
                         "metrics");
        read_value(*it, "bins", config.metrics.bins);
        read_value(*it, "queries", config.metrics.density_queries);
        read_value(*it, "mu", config.metrics.pattern_mu);
        read_value(*it, "phi", config.metrics.phi);
        read_value(*it, "pattern_grid", config.metrics.pattern_grid);
        if (const auto rr = it->find("radius_range"); rr != it->end() && !rr->is_null()) {
            if (!rr->is_array() || rr->size() != 2) {
                bad_config("metrics.radius_range must be [min_frac, max_frac]");
            }
            config.metrics.radius_min_frac = (*rr)[0].get<double>();
            config.metrics.radius_max_frac = (*rr)[1].get<double>();
        }
    }

    read_value(doc, "heatmap", config.heatmap);
    if (const auto it = doc.find("model"); it != doc.end() && !it->is_null()) {
        config.model = parse_model_policy(it->get<std::string>());
    }
    read_value(doc, "second_layer_states", config.second_layer_states);
    if (const auto it = doc.find("trip_estimation"); it != doc.end() && !it->is_null()) {
        config.trip_estimation = parse_trip_estimation(it->get<std::string>());
    }
    read_value(doc, "dense_order2", config.dense_order2);
    read_value(doc, "noise_disabled", config.noise_disabled);
    read_value(doc, "unsafe_no_dp", config.unsafe_no_dp);
    read_value(doc, "write_diagnostics", config.write_diagnostics);
    read_value(doc, "out_dir", config.out_dir);

    if (const auto it = doc.find("ablation"); it != doc.end() && !it->is_null()) {
        apply_ablation_preset(config, it->get<int>());
    }
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::vector<std::string> validate_config(const RunConfig& config) {
    std::vector<std::string> diagnostics;
    const auto complain = [&diagnostics](const std::string& message) {
        diagnostics.push_back(message);
    };

    if (config.input_path.empty() && config.builtin.empty()) {
        complain("config must name an input file or a builtin world");
    }
    if (!config.input_path.empty() && !config.builtin.empty()) {
        complain("input and builtin are mutually exclusive");
    }
    if (!config.builtin.empty()) {
        const auto names = builtin_world_names();
        if (std::find(names.begin(), names.end(), config.builtin) == names.end()) {
            complain("unknown builtin world '" + config.builtin + "'");
        }
    }
    if (!(config.epsilon_total > 0.0) || !std::isfinite(config.epsilon_total)) {
        complain("epsilon must be positive");
    }
    double ratio_sum = 0.0;
    bool ratios_positive = true;
    for (double r : config.budget_ratios) {
        ratios_positive = ratios_positive && r > 0.0 && std::isfinite(r);
        ratio_sum += r;
    }
    if (!ratios_positive) {
        complain("budget ratios must be positive");
    } else if (std::abs(ratio_sum - 1.0) > 1e-9) {
        complain("ratios must sum to 1");
    }
    if (!(config.c > 0.0)) {
        complain("c must be positive");
    }
    if (config.k && *config.k < 1) {
        complain("k must be at least 1");
    }
    if (!(config.pop > 0.0)) {
        complain("pop is required and must be positive");
    }
    if (!(config.kappa_denom > 0.0)) {
        complain("kappa_denom must be positive");
    }
    if (config.theta1 && !(*config.theta1 > 0.0)) {
        complain("theta1 must be positive");
    }
    if (!(config.theta2 > 1.0)) {
        complain("theta2 must be greater than 1");
    }
    if (config.n_syn && *config.n_syn < 1) {
        complain("n_syn must be at least 1");
    }
    if (config.max_len && *config.max_len < 1) {
        complain("max_len must be at least 1");
    }
    if (config.repetitions < 1) {
        complain("repetitions must be at least 1");
    }
    if (config.metrics.bins < 1) {
        complain("metrics.bins must be at least 1");
    }
    if (config.metrics.density_queries < 1) {
        complain("metrics.queries must be at least 1");
    }
    if (config.metrics.pattern_mu < 1) {
        complain("metrics.mu must be at least 1");
    }
    if (config.metrics.pattern_grid < 1 || config.metrics.pattern_grid > 255) {
        complain("metrics.pattern_grid must be in [1, 255]");
    }
    if (!(config.metrics.radius_min_frac > 0.0) ||
        !(config.metrics.radius_max_frac >= config.metrics.radius_min_frac)) {
        complain("metrics.radius_range must satisfy 0 < min <= max");
    }
    if (config.noise_disabled && !config.unsafe_no_dp) {
        complain("noise_disabled runs are refused without unsafe_no_dp (--unsafe-no-dp)");
    }
    return diagnostics;
}

std::string config_to_json(const RunConfig& config) {
    json j;
    j["input"] = config.input_path;
    j["builtin"] = config.builtin;
    j["epsilon_total"] = config.epsilon_total;
    j["budget_ratios"] = config.budget_ratios;
    j["c"] = config.c;
    j["k"] = config.k ? json(*config.k) : json(nullptr);
    j["pop"] = config.pop;
    j["kappa_denom"] = config.kappa_denom;
    j["theta1"] = config.theta1 ? json(*config.theta1) : json(nullptr);
    j["theta2"] = config.theta2;
    j["n_syn"] = config.n_syn ? json(*config.n_syn) : json(nullptr);
    j["max_len"] = config.max_len ? json(*config.max_len) : json(nullptr);
    j["seed"] = config.seed;
    j["repetitions"] = config.repetitions;
    j["metrics"] = {{"bins", config.metrics.bins},
                    {"queries", config.metrics.density_queries},
                    {"mu", config.metrics.pattern_mu},
                    {"phi", config.metrics.phi},
                    {"pattern_grid", config.metrics.pattern_grid},
                    {"radius_range",
                     {config.metrics.radius_min_frac, config.metrics.radius_max_frac}}};
    j["heatmap"] = config.heatmap;
    j["model"] = model_policy_name(config.model);
    j["second_layer_states"] = config.second_layer_states;
    j["trip_estimation"] = trip_estimation_name(config.trip_estimation);
    j["dense_order2"] = config.dense_order2;
    j["noise_disabled"] = config.noise_disabled;
    j["unsafe_no_dp"] = config.unsafe_no_dp;
    j["write_diagnostics"] = config.write_diagnostics;
    j["out_dir"] = config.out_dir;
    return j.dump(2);
}

std::string config_hash(const RunConfig& config) {
    json j = json::parse(config_to_json(config));
    j.erase("out_dir");  // where results go does not change what they are
    const std::string canonical = j.dump();
    std::uint64_t h = kFnvOffset;
    for (const unsigned char c : canonical) {
        h ^= c;
        h *= kFnvPrime;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void apply_ablation_preset(RunConfig& config, int preset) {
    switch (preset) {
        case 1:
            config.model = ModelPolicy::FirstOrder;
            config.second_layer_states = false;
            config.trip_estimation = TripEstimation::RawStartEnd;
            return;
        case 2:
            config.model = ModelPolicy::SecondOrder;
            config.second_layer_states = false;
            config.trip_estimation = TripEstimation::RawStartEnd;
            return;
        case 3:
            config.model = ModelPolicy::Adaptive;
            config.second_layer_states = false;
            config.trip_estimation = TripEstimation::RawStartEnd;
            return;
        case 4:
            config.model = ModelPolicy::Adaptive;
            config.second_layer_states = true;
            config.trip_estimation = TripEstimation::RawStartEnd;
            return;
        case 5:
            config.model = ModelPolicy::Adaptive;
            config.second_layer_states = true;
            config.trip_estimation = TripEstimation::Optimized;
            return;
        default:
            bad_config("ablation preset must be 1..5");
    }
}

}  // namespace dptraj
