#include <doctest.h>

#include <cmath>
#include <map>

#include "dptraj/grid.hpp"
#include "dptraj/synthgen.hpp"

using namespace dptraj;

namespace {

// Cell walk of a generated trajectory on the world grid.
std::vector<int> world_walk(const Trajectory& t, const ToyWorldSpec& spec) {
    const FirstLayerGrid grid(spec.bbox, spec.g);
    return trajectory_to_cells(t, grid);
}

ToyWorldSpec point_mass_world() {
    ToyWorldSpec spec;
    spec.g = 2;
    const std::size_t cells = 4;
    spec.transitions.assign(cells + 1, std::vector<double>(cells + 1, 0.0));
    for (std::size_t c = 0; c < cells; ++c) {
        spec.transitions[c][cells] = 1.0;  // every cell ends immediately
    }
    spec.transitions[cells][2] = 1.0;  // START -> cell 2
    spec.n_trajectories = 60;
    spec.points_per_visit = 3;
    return spec;
}

}  // namespace

TEST_CASE("generate_toy_dataset basics") {
    SUBCASE("cardinality") {
        ToyWorldSpec spec = builtin_world("ring");
        spec.n_trajectories = 100;
        const TrajectoryDataset d = generate_toy_dataset(spec, Rng(3));
        CHECK(d.size() == 100);
        CHECK_NOTHROW(validate_dataset(d));
    }

    SUBCASE("point-mass chain gives single-cell trajectories") {
        const ToyWorldSpec spec = point_mass_world();
        const TrajectoryDataset d = generate_toy_dataset(spec, Rng(5));
        REQUIRE(d.size() == 60);
        for (const Trajectory& t : d.trajectories) {
            CHECK(t.size() == 3);  // points_per_visit points in the one cell
            REQUIRE(world_walk(t, spec) == std::vector<int>{2});
        }
    }

    SUBCASE("same seed reproduces the dataset") {
        const ToyWorldSpec spec = builtin_world("two_cluster");
        const TrajectoryDataset a = generate_toy_dataset(spec, Rng(11));
        const TrajectoryDataset b = generate_toy_dataset(spec, Rng(11));
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            REQUIRE(a.trajectories[i].size() == b.trajectories[i].size());
            for (std::size_t j = 0; j < a.trajectories[i].size(); ++j) {
                REQUIRE(a.trajectories[i].points[j].x == b.trajectories[i].points[j].x);
                REQUIRE(a.trajectories[i].points[j].y == b.trajectories[i].points[j].y);
            }
        }
    }

    SUBCASE("invalid rows are rejected") {
        ToyWorldSpec spec = point_mass_world();
        spec.transitions[0][0] = 0.5;  // row no longer sums to 1
        CHECK_THROWS_AS(generate_toy_dataset(spec, Rng(1)), std::invalid_argument);
    }
}

TEST_CASE("builtin_world") {
    SUBCASE("known names validate") {
        for (const std::string& name : builtin_world_names()) {
            const ToyWorldSpec spec = builtin_world(name);
            CHECK_NOTHROW(validate_world(spec));
            CHECK(spec.g >= 2);
        }
        CHECK(builtin_world("corridor").g == 6);
        CHECK(builtin_world("corridor").n_trajectories == 5000);
    }

    SUBCASE("unknown name errors") {
        CHECK_THROWS_AS(builtin_world("unknown"), std::invalid_argument);
    }
}

TEST_CASE("ring walks rarely end before four states") {
    const ToyWorldSpec spec = builtin_world("ring");
    // Monte-Carlo on the ground-truth chain itself.
    Rng rng(42);
    const std::size_t cells = static_cast<std::size_t>(spec.g) * spec.g;
    int long_enough = 0;
    const int walks = 20000;
    for (int w = 0; w < walks; ++w) {
        // Sample the chain directly from the spec's rows.
        std::size_t state = cells;  // START row
        int visited = 0;
        while (visited < 4) {
            const std::vector<double>& row = spec.transitions[state];
            const double u = rng.uniform01();
            double acc = 0.0;
            std::size_t next = cells;
            for (std::size_t i = 0; i <= cells; ++i) {
                acc += row[i];
                if (u < acc) {
                    next = i;
                    break;
                }
            }
            if (next == cells && state != cells) {
                break;  // END drawn
            }
            state = next;
            ++visited;
        }
        if (visited >= 4) {
            ++long_enough;
        }
    }
    CHECK(static_cast<double>(long_enough) / walks > 0.9);
}

TEST_CASE("empirical transition frequencies approach the ground truth") {
    for (const std::string& name : {std::string("ring"), std::string("two_cluster")}) {
        ToyWorldSpec spec = builtin_world(name);
        spec.n_trajectories = 10000;
        const TrajectoryDataset d = generate_toy_dataset(spec, Rng(14));
        const std::size_t cells = static_cast<std::size_t>(spec.g) * spec.g;

        // Empirical per-row frequencies over cells + END.
        std::vector<std::vector<double>> counts(cells, std::vector<double>(cells + 1, 0.0));
        for (const Trajectory& t : d.trajectories) {
            const std::vector<int> walk = world_walk(t, spec);
            for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
                counts[walk[i]][walk[i + 1]] += 1.0;
            }
            if (walk.size() < 50) {  // untruncated walks observed their end
                counts[walk.back()][cells] += 1.0;
            }
        }
        for (std::size_t c = 0; c < cells; ++c) {
            double total = 0.0;
            for (double v : counts[c]) {
                total += v;
            }
            if (total < 2000.0) {
                continue;  // too few visits for a sharp check
            }
            double tv = 0.0;
            for (std::size_t j = 0; j <= cells; ++j) {
                tv += std::abs(counts[c][j] / total - spec.transitions[c][j]);
            }
            CAPTURE(name);
            CAPTURE(c);
            CAPTURE(total);
            CHECK(tv / 2.0 <= 0.02);
        }
    }
}

TEST_CASE("second_order world honours its context overrides") {
    ToyWorldSpec spec = builtin_world("second_order");
    spec.n_trajectories = 8000;
    const TrajectoryDataset d = generate_toy_dataset(spec, Rng(31));

    // Count what follows the hub depending on the approach cell.
    const int hub = 2 * 5 + 1;
    const int a_in = 2 * 5 + 0;
    const int a_out = 2 * 5 + 2;
    const int b_in = 3 * 5 + 1;
    const int b_out = 1 * 5 + 1;
    std::map<std::pair<int, int>, double> follow;
    std::map<int, double> approach_total;
    for (const Trajectory& t : d.trajectories) {
        const std::vector<int> walk = world_walk(t, spec);
        for (std::size_t i = 2; i < walk.size(); ++i) {
            if (walk[i - 1] == hub) {
                follow[{walk[i - 2], walk[i]}] += 1.0;
                approach_total[walk[i - 2]] += 1.0;
            }
        }
    }
    REQUIRE(approach_total[a_in] > 500);
    REQUIRE(approach_total[b_in] > 500);
    CHECK(follow[{a_in, a_out}] / approach_total[a_in] == doctest::Approx(0.95).epsilon(0.03));
    CHECK(follow[{b_in, b_out}] / approach_total[b_in] == doctest::Approx(0.95).epsilon(0.03));
}
