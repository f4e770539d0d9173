#ifndef ADT_RNG_HPP
#define ADT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace adt {

// Counter-based pseudo-random generator with value semantics.
//
// Output i of a stream keyed by k is mix(k + i*gamma), the SplitMix64
// construction. There is no hidden global state: every consumer receives a
// generator explicitly, and split() derives an independent child stream, so
// simulation clusters are bit-reproducible regardless of evaluation order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(mix(seed ^ kKeyTag)) {}

    std::uint64_t next_u64() { return mix(key_ + kGamma * ++ctr_); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

    // Box-Muller; consumes exactly two uniforms per call.
    double normal(double mean, double stddev) {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 0x1.0p-70) u1 = 0x1.0p-70;
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        return mean + stddev * r * std::cos(two_pi * u2);
    }

    // Derives an independent child stream; advances this stream by one draw.
    Rng split() { return Rng(next_u64(), SplitTag{}); }

private:
    struct SplitTag {};
    Rng(std::uint64_t key, SplitTag) : key_(mix(key ^ kSplitSalt)) {}

    // 64-bit finalizer (murmur3 fmix64).
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 33;
        z *= 0xff51afd7ed558ccdULL;
        z ^= z >> 33;
        z *= 0xc4ceb9fe1a85ec53ULL;
        z ^= z >> 33;
        return z;
    }

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kKeyTag = 0x5851f42d4c957f2dULL;
    static constexpr std::uint64_t kSplitSalt = 0xd6e8feb86659fd93ULL;

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace adt

#endif
