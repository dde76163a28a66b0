#include "dptraj/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "dptraj/grid.hpp"

namespace dptraj {

Histogram distribution_of(const TrajectoryDataset& d, TrajectoryQuantity quantity, int n_bins,
                          double upper) {
    if (n_bins < 1 || !(upper > 0.0)) {
        throw std::invalid_argument("histogram needs n_bins >= 1 and upper > lower");
    }
    Histogram h;
    h.lower = 0.0;
    h.upper = upper;
    h.masses.assign(n_bins, 0.0);
    if (d.trajectories.empty()) {
        return h;
    }
    for (const Trajectory& t : d.trajectories) {
        const double v =
            quantity == TrajectoryQuantity::Length ? trajectory_length(t) : trajectory_diameter(t);
        int bin = static_cast<int>(v / upper * n_bins);
        bin = std::clamp(bin, 0, n_bins - 1);  // values at the max edge fall in the last bin
        h.masses[bin] += 1.0;
    }
    const double n = static_cast<double>(d.trajectories.size());
    for (double& mass : h.masses) {
        mass /= n;
    }
    return h;
}

double jsd(const Histogram& p, const Histogram& q) {
    if (!p.same_edges(q)) {
        throw std::invalid_argument("jsd requires identical histogram edges");
    }
    double divergence = 0.0;
    for (std::size_t i = 0; i < p.masses.size(); ++i) {
        const double a = p.masses[i];
        const double b = q.masses[i];
        const double mid = 0.5 * (a + b);
        if (a > 0.0) {
            divergence += 0.5 * a * std::log2(a / mid);
        }
        if (b > 0.0) {
            divergence += 0.5 * b * std::log2(b / mid);
        }
    }
    return divergence;
}

double resolve_phi(double phi, std::size_t n_original) {
    if (phi > 0.0) {
        return phi;
    }
    return std::max(1.0, 0.001 * static_cast<double>(n_original));
}

namespace {

void require_same_bbox(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s) {
    const BoundingBox& a = d_o.bbox;
    const BoundingBox& b = d_s.bbox;
    if (a.xmin != b.xmin || a.ymin != b.ymin || a.xmax != b.xmax || a.ymax != b.ymax) {
        throw std::invalid_argument("compared datasets must share a bounding box");
    }
}

}  // namespace

std::uint64_t density_query_count(const TrajectoryDataset& d, const DensityQuery& query) {
    const double r2 = query.radius * query.radius;
    std::uint64_t count = 0;
    for (const Trajectory& t : d.trajectories) {
        for (const Point& p : t.points) {
            const double dx = p.x - query.center.x;
            const double dy = p.y - query.center.y;
            if (dx * dx + dy * dy <= r2) {
                ++count;
                break;
            }
        }
    }
    return count;
}

double density_are_for_queries(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s,
                               const std::vector<DensityQuery>& queries, double phi) {
    if (queries.empty()) {
        throw std::invalid_argument("density_are needs at least one query");
    }
    double total = 0.0;
    for (const DensityQuery& query : queries) {
        const double count_o = static_cast<double>(density_query_count(d_o, query));
        const double count_s = static_cast<double>(density_query_count(d_s, query));
        total += std::abs(count_o - count_s) / std::max(count_o, phi);
    }
    return total / static_cast<double>(queries.size());
}

double density_are(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s,
                   const MetricParams& params, Rng& rng) {
    require_same_bbox(d_o, d_s);
    if (params.density_queries < 1) {
        throw std::invalid_argument("density_are needs at least one query");
    }
    const BoundingBox& box = d_o.bbox;
    const double diag = box.diagonal();
    std::vector<DensityQuery> queries(params.density_queries);
    for (DensityQuery& query : queries) {
        query.center = {rng.uniform(box.xmin, box.xmax), rng.uniform(box.ymin, box.ymax)};
        query.radius = diag * rng.uniform(params.radius_min_frac, params.radius_max_frac);
    }
    return density_are_for_queries(d_o, d_s, queries, resolve_phi(params.phi, d_o.size()));
}

bool Pattern::operator==(const Pattern& o) const {
    return len == o.len && std::equal(cells.begin(), cells.begin() + len, o.cells.begin());
}

bool Pattern::operator<(const Pattern& o) const {
    return std::lexicographical_compare(cells.begin(), cells.begin() + len, o.cells.begin(),
                                        o.cells.begin() + o.len);
}

std::map<Pattern, std::uint64_t> count_patterns(const TrajectoryDataset& d, int g,
                                                const BoundingBox& bbox) {
    if (g < 1 || g * g > 65536) {
        throw std::invalid_argument("pattern grid size out of range");
    }
    const FirstLayerGrid grid(bbox, g);
    std::map<Pattern, std::uint64_t> counts;
    for (const Trajectory& t : d.trajectories) {
        const std::vector<int> cells = trajectory_to_cells(t, grid);
        for (std::size_t start = 0; start < cells.size(); ++start) {
            const std::size_t longest = std::min<std::size_t>(5, cells.size() - start);
            for (std::size_t len = 2; len <= longest; ++len) {
                Pattern pattern;
                pattern.len = static_cast<std::uint8_t>(len);
                for (std::size_t k = 0; k < len; ++k) {
                    pattern.cells[k] = static_cast<std::uint16_t>(cells[start + k]);
                }
                ++counts[pattern];
            }
        }
    }
    return counts;
}

PatternAreResult pattern_are(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s,
                             const MetricParams& params) {
    require_same_bbox(d_o, d_s);
    const double phi = resolve_phi(params.phi, d_o.size());
    const auto counts_o = count_patterns(d_o, params.pattern_grid, d_o.bbox);
    const auto counts_s = count_patterns(d_s, params.pattern_grid, d_o.bbox);

    // Top-mu by original count; ties by lexicographic pattern order, which the
    // map iteration order supplies for free.
    std::vector<std::pair<const Pattern*, std::uint64_t>> ranked;
    ranked.reserve(counts_o.size());
    for (const auto& [pattern, count] : counts_o) {
        ranked.emplace_back(&pattern, count);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    const std::size_t mu_used = std::min<std::size_t>(ranked.size(), params.pattern_mu);

    PatternAreResult result;
    result.mu_used = static_cast<int>(mu_used);
    if (mu_used == 0) {
        return result;
    }
    double total = 0.0;
    for (std::size_t r = 0; r < mu_used; ++r) {
        const auto it = counts_s.find(*ranked[r].first);
        const double count_o = static_cast<double>(ranked[r].second);
        const double count_s = it == counts_s.end() ? 0.0 : static_cast<double>(it->second);
        total += std::abs(count_o - count_s) / std::max(count_o, phi);
    }
    result.are = total / static_cast<double>(mu_used);
    return result;
}

double pattern_set_are(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s, int g,
                       const std::vector<Pattern>& patterns, double phi) {
    require_same_bbox(d_o, d_s);
    if (patterns.empty()) {
        throw std::invalid_argument("pattern_set_are needs a non-empty pattern set");
    }
    const auto counts_o = count_patterns(d_o, g, d_o.bbox);
    const auto counts_s = count_patterns(d_s, g, d_o.bbox);
    const auto lookup = [](const std::map<Pattern, std::uint64_t>& counts, const Pattern& p) {
        const auto it = counts.find(p);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second);
    };
    double total = 0.0;
    for (const Pattern& p : patterns) {
        const double count_o = lookup(counts_o, p);
        const double count_s = lookup(counts_s, p);
        total += std::abs(count_o - count_s) / std::max(count_o, phi);
    }
    return total / static_cast<double>(patterns.size());
}

std::string MetricReport::to_json() const {
    nlohmann::json j;
    j["length_jsd"] = length_jsd;
    j["diameter_jsd"] = diameter_jsd;
    j["density_are"] = density_are;
    j["pattern_are"] = pattern_are;
    j["bins"] = bins;
    j["density_queries"] = density_queries;
    j["pattern_mu_requested"] = pattern_mu_requested;
    j["pattern_mu_used"] = pattern_mu_used;
    j["pattern_grid"] = pattern_grid;
    j["phi"] = phi;
    j["radius_min_frac"] = radius_min_frac;
    j["radius_max_frac"] = radius_max_frac;
    return j.dump(2) + "\n";
}

namespace {

double dataset_max(const TrajectoryDataset& d, TrajectoryQuantity quantity) {
    double best = 0.0;
    for (const Trajectory& t : d.trajectories) {
        const double v =
            quantity == TrajectoryQuantity::Length ? trajectory_length(t) : trajectory_diameter(t);
        best = std::max(best, v);
    }
    return best;
}

}  // namespace

MetricReport evaluate_metrics(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s,
                              const MetricParams& params, Rng& rng) {
    require_same_bbox(d_o, d_s);
    MetricReport report;
    report.bins = params.bins;
    report.density_queries = params.density_queries;
    report.pattern_mu_requested = params.pattern_mu;
    report.pattern_grid = params.pattern_grid;
    report.phi = resolve_phi(params.phi, d_o.size());
    report.radius_min_frac = params.radius_min_frac;
    report.radius_max_frac = params.radius_max_frac;

    for (const TrajectoryQuantity quantity :
         {TrajectoryQuantity::Length, TrajectoryQuantity::Diameter}) {
        // Shared range so both histograms cover the same support.
        const double shared_max = std::max(dataset_max(d_o, quantity), dataset_max(d_s, quantity));
        const double upper = shared_max > 0.0 ? shared_max : 1.0;
        const Histogram h_o = distribution_of(d_o, quantity, params.bins, upper);
        const Histogram h_s = distribution_of(d_s, quantity, params.bins, upper);
        const double value = jsd(h_o, h_s);
        if (quantity == TrajectoryQuantity::Length) {
            report.length_jsd = value;
        } else {
            report.diameter_jsd = value;
        }
    }

    report.density_are = density_are(d_o, d_s, params, rng);
    const PatternAreResult pattern = pattern_are(d_o, d_s, params);
    report.pattern_are = pattern.are;
    report.pattern_mu_used = pattern.mu_used;
    return report;
}

std::string density_heatmap_csv(const TrajectoryDataset& d, int g) {
    const FirstLayerGrid grid(d.bbox, g);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(g) * g, 0);
    std::vector<bool> visited(counts.size());
    for (const Trajectory& t : d.trajectories) {
        std::fill(visited.begin(), visited.end(), false);
        for (const Point& p : t.points) {
            visited[grid.cell_of(p)] = true;
        }
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (visited[c]) {
                ++counts[c];
            }
        }
    }
    std::string out;
    for (int iy = 0; iy < g; ++iy) {
        for (int ix = 0; ix < g; ++ix) {
            if (ix > 0) {
                out.push_back(',');
            }
            out += std::to_string(counts[static_cast<std::size_t>(iy) * g + ix]);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace dptraj
