#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "dptraj/grid.hpp"
#include "dptraj/metrics.hpp"
#include "dptraj/rng.hpp"

using namespace dptraj;

namespace {

Histogram from_masses(std::vector<double> masses) {
    Histogram h;
    h.lower = 0.0;
    h.upper = 1.0;
    h.masses = std::move(masses);
    return h;
}

// Direct evaluation of the divergence definition, kept separate from the
// implementation under test.
double jsd_oracle(const std::vector<double>& p, const std::vector<double>& q) {
    const auto kl = [](const std::vector<double>& a, const std::vector<double>& m) {
        double total = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] > 0.0) {
                total += a[i] * std::log2(a[i] / m[i]);
            }
        }
        return total;
    };
    std::vector<double> mid(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        mid[i] = 0.5 * (p[i] + q[i]);
    }
    return 0.5 * kl(p, mid) + 0.5 * kl(q, mid);
}

TrajectoryDataset cluster_dataset(const BoundingBox& box, int n, int grid_points_per_side) {
    // Every trajectory carries a dense grid of points, so any admissible
    // query circle contains at least one point of each trajectory.
    TrajectoryDataset d;
    d.bbox = box;
    Trajectory dense;
    for (int i = 0; i < grid_points_per_side; ++i) {
        for (int j = 0; j < grid_points_per_side; ++j) {
            dense.points.push_back(
                {box.xmin + box.width() * (i + 0.5) / grid_points_per_side,
                 box.ymin + box.height() * (j + 0.5) / grid_points_per_side});
        }
    }
    for (int k = 0; k < n; ++k) {
        d.trajectories.push_back(dense);
    }
    return d;
}

Pattern make_pattern(std::initializer_list<std::uint16_t> cells) {
    Pattern p;
    p.len = static_cast<std::uint8_t>(cells.size());
    std::size_t i = 0;
    for (const std::uint16_t c : cells) {
        p.cells[i++] = c;
    }
    return p;
}

}  // namespace

TEST_CASE("jsd reference values") {
    CHECK(jsd(from_masses({0.3, 0.7}), from_masses({0.3, 0.7})) == 0.0);
    // Hand-derivable case.
    const double v = jsd(from_masses({1.0, 0.0}), from_masses({0.5, 0.5}));
    CHECK(v == doctest::Approx(0.311278).epsilon(1e-5));
    CHECK(v == doctest::Approx(jsd_oracle({1.0, 0.0}, {0.5, 0.5})).epsilon(1e-12));
    // Disjoint support maxes out at 1 in base 2.
    CHECK(jsd(from_masses({1.0, 0.0}), from_masses({0.0, 1.0})) == doctest::Approx(1.0));

    Histogram other = from_masses({0.5, 0.5});
    other.upper = 2.0;
    CHECK_THROWS_AS(jsd(from_masses({1.0, 0.0}), other), std::invalid_argument);
}

TEST_CASE("jsd properties over random histogram pairs") {
    Rng rng(1001);
    for (int iter = 0; iter < 10000; ++iter) {
        const std::size_t bins = 2 + rng.uniform_index(6);
        std::vector<double> p(bins), q(bins);
        double sp = 0.0;
        double sq = 0.0;
        for (std::size_t i = 0; i < bins; ++i) {
            p[i] = rng.uniform01();
            q[i] = rng.uniform01();
            sp += p[i];
            sq += q[i];
        }
        for (std::size_t i = 0; i < bins; ++i) {
            p[i] /= sp;
            q[i] /= sq;
        }
        const double pq = jsd(from_masses(p), from_masses(q));
        const double qp = jsd(from_masses(q), from_masses(p));
        REQUIRE(std::abs(pq - qp) <= 1e-12);
        REQUIRE(pq >= 0.0);
        REQUIRE(pq <= 1.0 + 1e-12);
        REQUIRE(jsd(from_masses(p), from_masses(p)) == 0.0);
        REQUIRE(std::abs(pq - jsd_oracle(p, q)) <= 1e-12);
    }
}

TEST_CASE("distribution_of binning") {
    SUBCASE("all-zero lengths pile into bin 0") {
        TrajectoryDataset d;
        d.bbox = {0, 0, 1, 1};
        for (int i = 0; i < 5; ++i) {
            d.trajectories.push_back({{{0.5, 0.5}}});
        }
        const Histogram h = distribution_of(d, TrajectoryQuantity::Length, 50, 1.0);
        CHECK(h.masses[0] == doctest::Approx(1.0));
    }

    SUBCASE("lengths 1 and 49 on [0, 50] land in bins 1 and 49") {
        TrajectoryDataset d;
        d.bbox = {0, 0, 100, 100};
        d.trajectories.push_back({{{0, 0}, {1, 0}}});
        d.trajectories.push_back({{{0, 0}, {49, 0}}});
        const Histogram h = distribution_of(d, TrajectoryQuantity::Length, 50, 50.0);
        CHECK(h.masses[1] == doctest::Approx(0.5));
        CHECK(h.masses[49] == doctest::Approx(0.5));
    }

    SUBCASE("value at the upper edge joins the last bin") {
        TrajectoryDataset d;
        d.bbox = {0, 0, 100, 100};
        d.trajectories.push_back({{{0, 0}, {50, 0}}});
        const Histogram h = distribution_of(d, TrajectoryQuantity::Length, 50, 50.0);
        CHECK(h.masses[49] == doctest::Approx(1.0));
    }

    SUBCASE("empty dataset gives an all-zero histogram") {
        TrajectoryDataset d;
        d.bbox = {0, 0, 1, 1};
        const Histogram h = distribution_of(d, TrajectoryQuantity::Diameter, 10, 1.0);
        for (double m : h.masses) {
            CHECK(m == 0.0);
        }
    }
}

TEST_CASE("density_are") {
    const BoundingBox box{0, 0, 1, 1};

    SUBCASE("identical datasets score 0 for any seed") {
        Rng data_rng(3);
        TrajectoryDataset d;
        d.bbox = box;
        for (int i = 0; i < 30; ++i) {
            Trajectory t;
            for (int j = 0; j < 4; ++j) {
                t.points.push_back({data_rng.uniform01(), data_rng.uniform01()});
            }
            d.trajectories.push_back(std::move(t));
        }
        for (const std::uint64_t seed : {1ull, 99ull, 12345ull}) {
            Rng rng(seed);
            CHECK(density_are(d, d, {}, rng) == 0.0);
        }
    }

    SUBCASE("halved counts give per-query error one half") {
        const TrajectoryDataset d_o = cluster_dataset(box, 10, 20);
        const TrajectoryDataset d_s = cluster_dataset(box, 5, 20);
        Rng rng(7);
        MetricParams params;
        params.density_queries = 200;
        params.phi = 1.0;
        CHECK(density_are(d_o, d_s, params, rng) == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("phi floors the denominator for empty originals") {
        TrajectoryDataset d_o;
        d_o.bbox = box;
        d_o.trajectories.push_back({{{0.01, 0.01}}});
        TrajectoryDataset d_s;
        d_s.bbox = box;
        for (int i = 0; i < 3; ++i) {
            d_s.trajectories.push_back({{{0.99, 0.99}}});
        }
        // One query far from d_o's single point, covering d_s's corner.
        const std::vector<DensityQuery> queries = {{{0.99, 0.99}, 0.05}};
        // Q(D_o) = 0, Q(D_s) = 3 = phi -> contributes exactly 1.
        CHECK(density_are_for_queries(d_o, d_s, queries, 3.0) == doctest::Approx(1.0));
    }

    SUBCASE("trajectory order does not matter") {
        Rng data_rng(8);
        TrajectoryDataset d_o;
        d_o.bbox = box;
        for (int i = 0; i < 20; ++i) {
            Trajectory t;
            for (int j = 0; j < 3; ++j) {
                t.points.push_back({data_rng.uniform01(), data_rng.uniform01()});
            }
            d_o.trajectories.push_back(std::move(t));
        }
        TrajectoryDataset d_s = d_o;
        std::reverse(d_s.trajectories.begin(), d_s.trajectories.end());
        Rng r1(5);
        Rng r2(5);
        MetricParams params;
        params.density_queries = 100;
        const double forward = density_are(d_o, d_s, params, r1);
        const double backward = density_are(d_s, d_o, params, r2);
        CHECK(forward == 0.0);
        CHECK(backward == 0.0);
    }
}

TEST_CASE("pattern counting matches brute force") {
    const BoundingBox box{0, 0, 3, 1};

    SUBCASE("three-state trajectory yields AB, BC, ABC") {
        TrajectoryDataset d;
        d.bbox = box;
        d.trajectories.push_back({{{0.5, 0.1}, {1.5, 0.1}, {2.5, 0.1}}});
        const auto counts = count_patterns(d, 3, box);
        // Bottom-row cells 0, 1, 2 of the 3x3 grid.
        CHECK(counts.size() == 3);
        CHECK(counts.at(make_pattern({0, 1})) == 1);
        CHECK(counts.at(make_pattern({1, 2})) == 1);
        CHECK(counts.at(make_pattern({0, 1, 2})) == 1);
    }

    SUBCASE("random small datasets agree with windowed enumeration") {
        Rng rng(2002);
        for (int iter = 0; iter < 50; ++iter) {
            TrajectoryDataset d;
            d.bbox = box;
            const int n_traj = 1 + static_cast<int>(rng.uniform_index(10));
            for (int i = 0; i < n_traj; ++i) {
                Trajectory t;
                const int n = 1 + static_cast<int>(rng.uniform_index(6));
                for (int j = 0; j < n; ++j) {
                    t.points.push_back({rng.uniform(0, 3), rng.uniform01()});
                }
                d.trajectories.push_back(std::move(t));
            }
            const int g = 4;
            const auto counts = count_patterns(d, g, box);

            // Brute force: discretize, collapse, enumerate all 2..5 windows.
            std::map<std::vector<int>, std::uint64_t> expected;
            const FirstLayerGrid grid(box, g);
            for (const Trajectory& t : d.trajectories) {
                std::vector<int> cells;
                for (const Point& p : t.points) {
                    const int c = grid.cell_of(p);
                    if (cells.empty() || cells.back() != c) {
                        cells.push_back(c);
                    }
                }
                for (std::size_t a = 0; a < cells.size(); ++a) {
                    for (std::size_t len = 2; len <= 5 && a + len <= cells.size(); ++len) {
                        ++expected[std::vector<int>(cells.begin() + a, cells.begin() + a + len)];
                    }
                }
            }
            REQUIRE(counts.size() == expected.size());
            for (const auto& [cells, count] : expected) {
                Pattern p;
                p.len = static_cast<std::uint8_t>(cells.size());
                for (std::size_t k = 0; k < cells.size(); ++k) {
                    p.cells[k] = static_cast<std::uint16_t>(cells[k]);
                }
                REQUIRE(counts.at(p) == count);
            }
        }
    }
}

TEST_CASE("pattern_are") {
    const BoundingBox box{0, 0, 1, 1};
    Rng data_rng(17);
    TrajectoryDataset d;
    d.bbox = box;
    for (int i = 0; i < 25; ++i) {
        Trajectory t;
        for (int j = 0; j < 5; ++j) {
            t.points.push_back({data_rng.uniform01(), data_rng.uniform01()});
        }
        d.trajectories.push_back(std::move(t));
    }

    SUBCASE("identical datasets score 0") {
        MetricParams params;
        const PatternAreResult r = pattern_are(d, d, params);
        CHECK(r.are == 0.0);
        CHECK(r.mu_used > 0);
    }

    SUBCASE("single-pattern halving gives 0.5") {
        // d_o repeats one two-cell pattern 10 times, d_s 5 times.
        TrajectoryDataset d_o;
        d_o.bbox = box;
        TrajectoryDataset d_s;
        d_s.bbox = box;
        const Trajectory hop{{{0.1, 0.1}, {0.9, 0.1}}};
        for (int i = 0; i < 10; ++i) {
            d_o.trajectories.push_back(hop);
        }
        for (int i = 0; i < 5; ++i) {
            d_s.trajectories.push_back(hop);
        }
        MetricParams params;
        params.pattern_mu = 1;
        params.phi = 1.0;
        params.pattern_grid = 2;
        const PatternAreResult r = pattern_are(d_o, d_s, params);
        CHECK(r.mu_used == 1);
        CHECK(r.are == doctest::Approx(0.5));
    }

    SUBCASE("fewer than mu patterns uses what exists") {
        MetricParams params;
        params.pattern_mu = 100000;
        const PatternAreResult r = pattern_are(d, d, params);
        CHECK(r.mu_used < 100000);
        CHECK(r.mu_used > 0);
    }
}

TEST_CASE("pattern_set_are isolates a chosen pattern set") {
    const BoundingBox box{0, 0, 2, 1};
    TrajectoryDataset d_o;
    d_o.bbox = box;
    TrajectoryDataset d_s;
    d_s.bbox = box;
    const Trajectory east{{{0.5, 0.25}, {1.5, 0.25}}};
    for (int i = 0; i < 8; ++i) {
        d_o.trajectories.push_back(east);
    }
    for (int i = 0; i < 2; ++i) {
        d_s.trajectories.push_back(east);
    }
    const std::vector<Pattern> set = {make_pattern({0, 1})};
    CHECK(pattern_set_are(d_o, d_s, 2, set, 1.0) == doctest::Approx(0.75));
}

TEST_CASE("metric report JSON carries all fields") {
    MetricReport report;
    report.length_jsd = 0.25;
    report.bins = 50;
    report.phi = 5.0;
    const std::string json = report.to_json();
    CHECK(json.find("\"length_jsd\": 0.25") != std::string::npos);
    CHECK(json.find("\"bins\": 50") != std::string::npos);
    CHECK(json.find("\"phi\": 5.0") != std::string::npos);
}

TEST_CASE("evaluate_metrics end to end on identical datasets") {
    const BoundingBox box{0, 0, 1, 1};
    Rng data_rng(5);
    TrajectoryDataset d;
    d.bbox = box;
    for (int i = 0; i < 40; ++i) {
        Trajectory t;
        for (int j = 0; j < 4; ++j) {
            t.points.push_back({data_rng.uniform01(), data_rng.uniform01()});
        }
        d.trajectories.push_back(std::move(t));
    }
    Rng rng(9);
    MetricParams params;
    params.density_queries = 50;
    const MetricReport report = evaluate_metrics(d, d, params, rng);
    CHECK(report.length_jsd == 0.0);
    CHECK(report.diameter_jsd == 0.0);
    CHECK(report.density_are == 0.0);
    CHECK(report.pattern_are == 0.0);
    CHECK(report.phi == doctest::Approx(1.0));
    CHECK(report.pattern_mu_used > 0);
}

TEST_CASE("heatmap CSV shape") {
    TrajectoryDataset d;
    d.bbox = {0, 0, 1, 1};
    d.trajectories.push_back({{{0.01, 0.01}, {0.99, 0.99}}});
    const std::string csv = density_heatmap_csv(d, 4);
    // 4 rows of 4 comma-separated counts.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(std::count(csv.begin(), csv.end(), ',') == 12);
    CHECK(csv.substr(0, 1) == "1");  // bottom-left cell visited
}
