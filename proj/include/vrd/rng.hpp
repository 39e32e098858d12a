#pragma once

#include <cstdint>

namespace vrd {

/// Stateless counter-based generator.
///
/// Every random number is a pure function of (seed, stream, counter): the
/// estimator uses the shot index as the stream and a per-shot draw index as
/// the counter, so any partition of shots across workers reproduces the same
/// draws. Mixing is the SplitMix64 finalizer applied to a key built from the
/// three words.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    constexpr std::uint64_t seed() const noexcept { return seed_; }

    constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const noexcept {
        std::uint64_t k = mix(seed_ ^ 0x243F6A8885A308D3ull);
        k = mix(k ^ (stream + 0x9E3779B97F4A7C15ull));
        k = mix(k ^ (counter * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
        return k;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
    }

    /// Independent seed for a labelled sub-experiment.
    constexpr CounterRng derive(std::uint64_t tag) const noexcept { return CounterRng(bits(~tag, 0x5EEDull)); }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
};

}  // namespace vrd
