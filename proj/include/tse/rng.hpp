#pragma once

// Counter-free per-path random streams.  Every Monte Carlo path owns an
// independently seeded generator, derived from (user seed, engine salt,
// global path index), so results do not depend on how paths are split
// across blocks or threads.

#include <cstdint>
#include <cmath>
#include <string_view>

namespace tse::rng {

// splitmix64 finalizer; also used as the generic 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    return mix64(state);
}

// FNV-1a, for turning estimator names into stream salts.
inline std::uint64_t salt_of(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t salt,
                                   std::uint64_t index) {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (salt + 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ (index + 0x9e3779b97f4a7c15ULL));
    return h;
}

class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
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

    // uniform in (0, 1]; never returns 0 so log() below is safe
    double next_unit_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // uniform in [0, 1)
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Box-Muller with the usual cached spare.
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = gen_.next_unit_open();
        const double u2 = gen_.next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    Xoshiro256pp gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tse::rng
