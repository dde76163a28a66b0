#include "dptraj/rng.hpp"

#include <stdexcept>

namespace dptraj {

namespace {

// FNV-1a, 64-bit. Stable across platforms, which std::hash is not.
constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t parent, const void* label, std::size_t len) {
    std::uint64_t h = fnv1a(kFnvOffset, &parent, sizeof(parent));
    h = fnv1a(h, label, len);
    // SplitMix64 finalizer to spread low-entropy labels.
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebull;
    h ^= h >> 31;
    return h;
}

}  // namespace

Rng Rng::substream(std::string_view name) const {
    return Rng(derive_seed(seed_, name.data(), name.size()));
}

Rng Rng::substream(std::uint64_t index) const {
    unsigned char tag[sizeof(index) + 1];
    tag[0] = 0x69;  // distinguishes indexed from named labels
    for (std::size_t i = 0; i < sizeof(index); ++i) {
        tag[i + 1] = static_cast<unsigned char>(index >> (8 * i));
    }
    return Rng(derive_seed(seed_, tag, sizeof(tag)));
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_index requires n > 0");
    }
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % n;
}

}  // namespace dptraj
