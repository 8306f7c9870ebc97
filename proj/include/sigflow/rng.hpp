#pragma once

#include <cmath>
#include <cstdint>

namespace sigflow {

// splitmix64 step; also used as the seed mixer for stream splitting.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based seed derivation: stream `counter` of a master seed.
// Independent of how many sibling streams exist, so per-trajectory and
// per-run streams never interact.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t counter) {
    std::uint64_t s = master + (counter + 1) * 0x9e3779b97f4a7c15ULL;
    return splitmix64(s);
}

// xoshiro256** with hand-rolled double generation. std:: distributions are
// implementation-defined, which would break bit-reproducibility of outputs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        for (auto& w : state_) w = splitmix64(seed);
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53 bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller. Draws two uniforms per call and keeps
    // one value, so there is no hidden cache state.
    double gaussian() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_[4];
};

}  // namespace sigflow
