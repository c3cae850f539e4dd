#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace v2xsim {

/// Deterministic pseudo-random stream keyed by (seed, label).
/// The same (seed, label) always yields the identical draw sequence;
/// distinct labels on the same seed yield independent streams.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::string_view label)
        : engine_(derive_state(seed, label)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 bits of mantissa.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static std::uint64_t fnv1a64(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    static std::uint64_t derive_state(std::uint64_t seed, std::string_view label) {
        return splitmix64(splitmix64(seed) ^ fnv1a64(label));
    }

    std::mt19937_64 engine_;
};

inline RngStream make_rng(std::uint64_t seed, std::string_view stream_label) {
    return RngStream(seed, stream_label);
}

} // namespace v2xsim
