#pragma once

#include <cstdint>
#include <string_view>

namespace mrmp {

// Deterministic splittable RNG used by every harness. The algorithm identity
// is part of the output contract: results are reproducible across platforms,
// unlike std::uniform_real_distribution whose rounding is implementation
// defined.
class SplitMix64 {
public:
    static constexpr std::string_view kAlgorithm = "splitmix64-v1";

    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Integer in [0, n).
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    // Independent child stream; mixing the stream id through the generator
    // keeps trials decorrelated while remaining order independent.
    SplitMix64 split(uint64_t stream_id) const {
        SplitMix64 mixer(state_ ^ (0x94d049bb133111ebull * (stream_id + 1)));
        return SplitMix64(mixer.next_u64());
    }

private:
    uint64_t state_;
};

}  // namespace mrmp
