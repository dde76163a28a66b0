#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dptraj {

/// Deterministic random source. Same seed, same platform-independent stream:
/// everything is built on the fully specified mt19937_64 output, never on
/// implementation-defined <random> distributions.
///
/// Substreams are derived by hashing a label into a fresh seed, so each
/// pipeline stage (and each trajectory within a stage) owns an independent
/// generator and toggling one stage's draws leaves the others untouched.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Independent named substream (e.g. "model-1", "generation").
    Rng substream(std::string_view name) const;

    /// Independent indexed substream (e.g. one per trajectory).
    Rng substream(std::uint64_t index) const;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in the open interval (0, 1).
    double uniform01() {
        const std::uint64_t bits = engine_() >> 11;  // top 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be > 0. Unbiased via rejection.
    std::uint64_t uniform_index(std::uint64_t n);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace dptraj
