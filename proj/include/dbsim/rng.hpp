#pragma once

#include <cmath>
#include <cstdint>

namespace dbsim {

/// Deterministic, platform-independent PRNG (xoshiro256++ seeded via
/// splitmix64). All simulation randomness goes through this class so that
/// a run is reproducible bit-for-bit regardless of standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) {
            word = splitmix64(s);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    /// Exponential variate with the given mean.
    double exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

    static std::uint64_t splitmix64(std::uint64_t& s) {
        s += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

/// Independent stream ids hung off one root seed. Traffic and motion streams
/// are split per user so that changing the mobility algorithm (which consumes
/// decision randomness) never perturbs the traffic realization.
enum class RngStream : std::uint64_t {
    UserTraffic = 1,
    UserMotion = 2,
    GtInit = 3,
    DroneInit = 4,
};

inline Rng make_stream(std::uint64_t root_seed, RngStream stream, std::uint64_t index) {
    std::uint64_t s = root_seed;
    std::uint64_t a = Rng::splitmix64(s);
    s = a ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL);
    std::uint64_t b = Rng::splitmix64(s);
    s = b ^ (index * 0x8cb92ba72f3d8dd7ULL);
    return Rng(Rng::splitmix64(s));
}

} // namespace dbsim
