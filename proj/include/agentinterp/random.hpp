#pragma once

#include <cstdint>
#include <random>

namespace agentinterp {

/// Seeded random source with a fixed, platform-independent output stream:
/// std::mt19937_64 (whose output sequence the standard pins down) with
/// uniforms built from the top 53 bits. The std distributions are avoided
/// because their algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, n), n > 0. Rejection sampling keeps it unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace agentinterp
