#include "dptraj/synthgen.hpp"

#include <cmath>
#include <stdexcept>

#include "dptraj/grid.hpp"

namespace dptraj {

namespace {

constexpr std::size_t kWalkCap = 50;

void validate_distribution(const std::vector<double>& row, std::size_t expected_size,
                           const char* what) {
    if (row.size() != expected_size) {
        throw std::invalid_argument(std::string(what) + ": wrong row size");
    }
    double sum = 0.0;
    for (double v : row) {
        if (v < 0.0 || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": invalid probability entry");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(what) + ": row does not sum to 1");
    }
}

std::size_t sample_distribution(const std::vector<double>& row, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        acc += row[i];
        if (u < acc) {
            return i;
        }
    }
    for (std::size_t i = row.size(); i-- > 0;) {
        if (row[i] > 0.0) {
            return i;
        }
    }
    throw std::logic_error("sample_distribution on an all-zero row");
}

}  // namespace

void validate_world(const ToyWorldSpec& spec) {
    if (spec.g < 2) {
        throw std::invalid_argument("toy world grid must be at least 2x2");
    }
    if (!spec.bbox.valid()) {
        throw std::invalid_argument("toy world bounding box is invalid");
    }
    if (spec.points_per_visit < 1) {
        throw std::invalid_argument("points_per_visit must be at least 1");
    }
    if (spec.n_trajectories == 0) {
        throw std::invalid_argument("toy world must generate at least one trajectory");
    }
    const std::size_t cells = static_cast<std::size_t>(spec.g) * spec.g;
    if (spec.transitions.size() != cells + 1) {
        throw std::invalid_argument("toy world needs one row per cell plus the start row");
    }
    for (const auto& row : spec.transitions) {
        validate_distribution(row, cells + 1, "toy world transition row");
    }
    if (spec.transitions[cells][cells] != 0.0) {
        throw std::invalid_argument("toy world start row must not select the end directly");
    }
    for (const auto& [context, row] : spec.second_order) {
        if (context.first < 0 || context.first >= static_cast<int>(cells) || context.second < 0 ||
            context.second >= static_cast<int>(cells)) {
            throw std::invalid_argument("toy world second-order context out of range");
        }
        validate_distribution(row, cells + 1, "toy world second-order row");
    }
}

TrajectoryDataset generate_toy_dataset(const ToyWorldSpec& spec, const Rng& rng) {
    validate_world(spec);
    const std::size_t cells = static_cast<std::size_t>(spec.g) * spec.g;
    const std::size_t end_column = cells;
    const FirstLayerGrid grid(spec.bbox, spec.g);

    TrajectoryDataset d;
    d.bbox = spec.bbox;
    d.trajectories.reserve(spec.n_trajectories);
    std::vector<std::size_t> walk;
    for (std::size_t i = 0; i < spec.n_trajectories; ++i) {
        Rng traj_rng = rng.substream(static_cast<std::uint64_t>(i));
        walk.clear();
        walk.push_back(sample_distribution(spec.transitions[cells], traj_rng));
        while (walk.size() < kWalkCap) {
            const std::size_t cur = walk.back();
            const std::vector<double>* row = &spec.transitions[cur];
            if (walk.size() >= 2) {
                const auto it = spec.second_order.find(
                    {static_cast<int>(walk[walk.size() - 2]), static_cast<int>(cur)});
                if (it != spec.second_order.end()) {
                    row = &it->second;
                }
            }
            const std::size_t next = sample_distribution(*row, traj_rng);
            if (next == end_column) {
                break;
            }
            walk.push_back(next);
        }
        Trajectory t;
        t.points.reserve(walk.size() * spec.points_per_visit);
        for (const std::size_t cell : walk) {
            const CellRect rect = grid.cell_rect(static_cast<int>(cell));
            for (int k = 0; k < spec.points_per_visit; ++k) {
                t.points.push_back({traj_rng.uniform(rect.x0, rect.x1),
                                    traj_rng.uniform(rect.y0, rect.y1)});
            }
        }
        d.trajectories.push_back(std::move(t));
    }
    return d;
}

namespace {

// Row/col helpers for readable world definitions; cell ids are row-major.
struct WorldBuilder {
    int g;
    std::vector<std::vector<double>> rows;

    explicit WorldBuilder(int grid_size)
        : g(grid_size), rows(std::size_t(g) * g + 1,
                             std::vector<double>(std::size_t(g) * g + 1, 0.0)) {
        // Unvisited cells end immediately so every row is a distribution.
        for (std::size_t c = 0; c < std::size_t(g) * g; ++c) {
            rows[c][std::size_t(g) * g] = 1.0;
        }
    }

    int cell(int row, int col) const { return row * g + col; }
    int end() const { return g * g; }
    int start() const { return g * g; }

    void set(int from, std::initializer_list<std::pair<int, double>> targets) {
        auto& row = rows[from];
        std::fill(row.begin(), row.end(), 0.0);
        for (const auto& [to, p] : targets) {
            row[to] = p;
        }
    }
};

ToyWorldSpec make_corridor() {
    // Dominant west-to-east flow along one row, a light parallel flow above.
    WorldBuilder w(6);
    const int main_row = 2;
    const int side_row = 3;
    w.set(w.start(), {{w.cell(main_row, 0), 0.9}, {w.cell(side_row, 0), 0.1}});
    for (int col = 0; col < 5; ++col) {
        w.set(w.cell(main_row, col), {{w.cell(main_row, col + 1), 1.0}});
        w.set(w.cell(side_row, col), {{w.cell(side_row, col + 1), 1.0}});
    }
    w.set(w.cell(main_row, 5), {{w.end(), 1.0}});
    w.set(w.cell(side_row, 5), {{w.end(), 1.0}});

    ToyWorldSpec spec;
    spec.g = 6;
    spec.transitions = std::move(w.rows);
    spec.points_per_visit = 1;
    spec.n_trajectories = 5000;
    return spec;
}

ToyWorldSpec make_two_cluster() {
    WorldBuilder w(5);
    const int a = w.cell(1, 1), a1 = w.cell(1, 2), a2 = w.cell(2, 1);
    const int bridge = w.cell(2, 2);
    const int b = w.cell(3, 3), b1 = w.cell(3, 2), b2 = w.cell(2, 3);
    w.set(w.start(), {{a, 0.5}, {b, 0.5}});
    w.set(a, {{a1, 0.4}, {a2, 0.4}, {bridge, 0.2}});
    w.set(a1, {{a, 0.4}, {bridge, 0.3}, {w.end(), 0.3}});
    w.set(a2, {{a, 0.4}, {bridge, 0.3}, {w.end(), 0.3}});
    w.set(bridge, {{b, 0.7}, {a, 0.15}, {w.end(), 0.15}});
    w.set(b, {{b1, 0.35}, {b2, 0.35}, {w.end(), 0.3}});
    w.set(b1, {{b, 0.5}, {w.end(), 0.5}});
    w.set(b2, {{b, 0.5}, {w.end(), 0.5}});

    ToyWorldSpec spec;
    spec.g = 5;
    spec.transitions = std::move(w.rows);
    spec.points_per_visit = 2;
    spec.n_trajectories = 3000;
    return spec;
}

ToyWorldSpec make_ring() {
    WorldBuilder w(4);
    const std::vector<int> ring = {w.cell(0, 0), w.cell(0, 1), w.cell(0, 2), w.cell(0, 3),
                                   w.cell(1, 3), w.cell(2, 3), w.cell(3, 3), w.cell(3, 2),
                                   w.cell(3, 1), w.cell(3, 0), w.cell(2, 0), w.cell(1, 0)};
    auto& start_row = w.rows[w.start()];
    for (const int c : ring) {
        start_row[c] = 1.0 / ring.size();
    }
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const int next = ring[(i + 1) % ring.size()];
        w.set(ring[i], {{next, 0.97}, {w.end(), 0.03}});
    }

    ToyWorldSpec spec;
    spec.g = 4;
    spec.transitions = std::move(w.rows);
    spec.points_per_visit = 2;
    spec.n_trajectories = 2000;
    return spec;
}

ToyWorldSpec make_second_order() {
    // Two busy routes cross at a hub; where a walk goes next depends on where
    // it came from. Two merge cells each pool three sparse feeder flows, so
    // the per-context counts there sit near the noise floor while the pooled
    // first-order rows stay clean.
    WorldBuilder w(5);
    const int hub = w.cell(2, 1);
    const int a_in = w.cell(2, 0), a_out = w.cell(2, 2), a_exit = w.cell(2, 3);
    const int b_in = w.cell(3, 1), b_out = w.cell(1, 1), b_exit = w.cell(0, 1);
    const int merge_s = w.cell(3, 3), exit_s = w.cell(3, 2);
    const int merge_n = w.cell(0, 3), exit_n = w.cell(0, 2);
    const std::vector<int> feeders_s = {w.cell(2, 4), w.cell(3, 4), w.cell(4, 2), w.cell(4, 3),
                                        w.cell(4, 4)};
    const std::vector<int> feeders_n = {w.cell(0, 4), w.cell(1, 2), w.cell(1, 3), w.cell(1, 4)};

    {
        auto& start_row = w.rows[w.start()];
        start_row[a_in] = 0.2975;
        start_row[b_in] = 0.2975;
        for (const int f : feeders_s) {
            start_row[f] = 0.045;
        }
        for (const int f : feeders_n) {
            start_row[f] = 0.045;
        }
    }
    w.set(a_in, {{hub, 1.0}});
    w.set(b_in, {{hub, 1.0}});
    w.set(hub, {{a_out, 0.5}, {b_out, 0.5}});  // first-order view: an even mix
    w.set(a_out, {{a_exit, 1.0}});
    w.set(a_exit, {{w.end(), 1.0}});
    w.set(b_out, {{b_exit, 1.0}});
    w.set(b_exit, {{w.end(), 1.0}});
    for (const int f : feeders_s) {
        w.set(f, {{merge_s, 1.0}});
    }
    for (const int f : feeders_n) {
        w.set(f, {{merge_n, 1.0}});
    }
    w.set(merge_s, {{exit_s, 1.0}});
    w.set(exit_s, {{w.end(), 1.0}});
    w.set(merge_n, {{exit_n, 1.0}});
    w.set(exit_n, {{w.end(), 1.0}});

    ToyWorldSpec spec;
    spec.g = 5;
    spec.transitions = std::move(w.rows);
    spec.points_per_visit = 1;
    spec.n_trajectories = 1600;

    const std::size_t cells = 25;
    const auto mostly = [cells](int main, int alt) {
        std::vector<double> row(cells + 1, 0.0);
        row[main] = 0.95;
        row[alt] = 0.05;
        return row;
    };
    spec.second_order[{a_in, hub}] = mostly(a_out, b_out);
    spec.second_order[{b_in, hub}] = mostly(b_out, a_out);
    return spec;
}

}  // namespace

ToyWorldSpec builtin_world(const std::string& name) {
    if (name == "corridor") {
        return make_corridor();
    }
    if (name == "two_cluster") {
        return make_two_cluster();
    }
    if (name == "ring") {
        return make_ring();
    }
    if (name == "second_order") {
        return make_second_order();
    }
    throw std::invalid_argument("unknown builtin world: " + name);
}

std::vector<std::string> builtin_world_names() {
    return {"corridor", "two_cluster", "ring", "second_order"};
}

}  // namespace dptraj
