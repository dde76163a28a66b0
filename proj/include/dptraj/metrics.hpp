#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dptraj/rng.hpp"
#include "dptraj/trajectory.hpp"

namespace dptraj {

/// Uniform-bin histogram over [lower, upper]; masses sum to 1, or are all
/// zero for empty input. Values exactly at the upper edge land in the last
/// bin.
struct Histogram {
    double lower = 0.0;
    double upper = 1.0;
    std::vector<double> masses;

    bool same_edges(const Histogram& o) const {
        return lower == o.lower && upper == o.upper && masses.size() == o.masses.size();
    }
};

enum class TrajectoryQuantity { Length, Diameter };

inline constexpr int kDefaultHistogramBins = 50;

/// Histogram of per-trajectory length or diameter. The range is supplied by
/// the caller so two compared datasets share support (use the max of the
/// quantity over both).
Histogram distribution_of(const TrajectoryDataset& d, TrajectoryQuantity quantity,
                          int n_bins, double upper);

/// Jensen-Shannon divergence, base-2 logarithm, 0*log 0 = 0; symmetric and
/// in [0, 1]. Throws std::invalid_argument on mismatched bin edges.
double jsd(const Histogram& p, const Histogram& q);

/// Circle query for trajectory density.
struct DensityQuery {
    Point center;
    double radius = 0.0;
};

struct MetricParams {
    int bins = kDefaultHistogramBins;
    int density_queries = 500;
    int pattern_mu = 200;
    int pattern_grid = 20;
    double phi = 0.0;  // <= 0: max(1, 0.001 * |D_o|)
    double radius_min_frac = 0.05;  // fraction of the bbox diagonal
    double radius_max_frac = 0.25;
};

double resolve_phi(double phi, std::size_t n_original);

/// Average relative error of trajectory-density queries: circles with
/// centers uniform in the bbox and radii uniform in
/// [radius_min_frac, radius_max_frac] of the bbox diagonal. A query counts
/// trajectories with at least one point inside the circle; each error is
/// |Q(D_o) - Q(D_s)| / max(Q(D_o), phi). Both datasets must share a bbox.
double density_are(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s,
                   const MetricParams& params, Rng& rng);

/// Same error formula over caller-provided queries.
double density_are_for_queries(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s,
                               const std::vector<DensityQuery>& queries, double phi);

/// Trajectories with at least one point inside the circle.
std::uint64_t density_query_count(const TrajectoryDataset& d, const DensityQuery& query);

/// A transition pattern: 2..5 consecutive states on a uniform grid.
struct Pattern {
    std::uint8_t len = 0;
    std::array<std::uint16_t, 5> cells{};

    bool operator==(const Pattern& o) const;
    bool operator<(const Pattern& o) const;  // lexicographic, by length last
};

/// All contiguous state subsequences of length 2..5 after discretizing each
/// trajectory on a g x g grid over bbox (consecutive duplicates collapsed),
/// with occurrence counts. Deterministically ordered.
std::map<Pattern, std::uint64_t> count_patterns(const TrajectoryDataset& d, int g,
                                                const BoundingBox& bbox);

/// Average relative error over the top-mu patterns of d_o (ties broken by
/// lexicographic pattern order). With fewer than mu distinct patterns, all
/// are used and mu_used reports the actual count.
struct PatternAreResult {
    double are = 0.0;
    int mu_used = 0;
};
PatternAreResult pattern_are(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s,
                             const MetricParams& params);

/// Focused variant used by directional studies: the ARE over an explicit
/// pattern set on a g x g grid.
double pattern_set_are(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s, int g,
                       const std::vector<Pattern>& patterns, double phi);

/// The four similarity scores plus the parameters they were computed with.
struct MetricReport {
    double length_jsd = 0.0;
    double diameter_jsd = 0.0;
    double density_are = 0.0;
    double pattern_are = 0.0;
    int bins = 0;
    int density_queries = 0;
    int pattern_mu_requested = 0;
    int pattern_mu_used = 0;
    int pattern_grid = 0;
    double phi = 0.0;
    double radius_min_frac = 0.0;
    double radius_max_frac = 0.0;

    /// Flat key-value JSON document.
    std::string to_json() const;
};

/// Computes all four metrics. Histogram ranges are shared between the two
/// datasets; the density queries consume the given rng.
MetricReport evaluate_metrics(const TrajectoryDataset& d_o, const TrajectoryDataset& d_s,
                              const MetricParams& params, Rng& rng);

/// Trajectory counts on a g x g grid (a trajectory counts once per cell it
/// visits), as CSV rows from ymin to ymax.
std::string density_heatmap_csv(const TrajectoryDataset& d, int g);

}  // namespace dptraj
