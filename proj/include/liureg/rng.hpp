#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace liureg {

// Deterministic, cross-platform RNG. std::normal_distribution is
// implementation-defined, so the project rolls its own generator and
// normal transform: identical seeds must give identical output bytes
// on every platform and for every worker count.

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// Derives a stream seed from a list of keys (master seed, cell hash,
// replicate index, ...). Order-sensitive chain of SplitMix64 steps.
inline std::uint64_t derive_stream(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = 0x6A09E667F3BCC909ULL;
    for (std::uint64_t k : keys) {
        SplitMix64 mix(h ^ (k + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
        h = mix.next();
    }
    return h;
}

class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 mix(seed);
        for (auto& w : s_) w = mix.next();
        have_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0,1); never returns 0 so log() is safe.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via polar Box-Muller (explicit algorithm, no
    // library dependence). One draw is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, q;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double f = std::sqrt(-2.0 * std::log(q) / q);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    bool have_spare_;
    double spare_;
};

}  // namespace liureg
