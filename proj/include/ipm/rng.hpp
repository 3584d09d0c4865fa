#pragma once

#include <cstdint>

namespace ipm {

/// Stateless counter-based random source.
///
/// Every draw is a pure function of (seed, stream, replica, index), so a
/// vertex state or edge coin does not depend on the order in which a sampler
/// visits vertices and edges. The mixing function is the splitmix64 finalizer
/// applied along a short absorb chain. Results are reproducible within this
/// implementation only.
class CounterRng {
public:
    enum class Stream : std::uint64_t {
        vertex_state = 1,
        edge_coin = 2,
        graph_build = 3,
        audit = 4,
        search = 5,
    };

    explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    [[nodiscard]] constexpr std::uint64_t seed() const noexcept { return seed_; }

    [[nodiscard]] constexpr std::uint64_t bits(Stream stream, std::uint64_t replica,
                                               std::uint64_t index) const noexcept {
        std::uint64_t h = mix(seed_ ^ 0x6a09e667f3bcc909ULL);
        h = mix(h ^ static_cast<std::uint64_t>(stream));
        h = mix(h ^ replica);
        return mix(h ^ index);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    [[nodiscard]] constexpr double uniform(Stream stream, std::uint64_t replica,
                                           std::uint64_t index) const noexcept {
        return static_cast<double>(bits(stream, replica, index) >> 11) * 0x1.0p-53;
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
};

/// Derives an independent seed for a sub-task (replica, start, cell).
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return CounterRng::mix(CounterRng::mix(seed) ^ (index + 0x243f6a8885a308d3ULL));
}

}  // namespace ipm
