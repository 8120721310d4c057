// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ppms {

/// FNV-1a over bytes; used to derive per-tensor seeds from names.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

/// Seeded generator with platform-independent float extraction. Avoids
/// std::uniform_real_distribution, whose output is implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1) with 24 bits of precision.
    float next_unit() {
        return static_cast<float>(eng_() >> 40) * (1.0f / 16777216.0f);
    }

    /// Uniform in [lo, hi).
    float uniform(float lo, float hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) { return eng_() % bound; }

  private:
    std::mt19937_64 eng_;  // output sequence is fully specified by the standard
};

}  // namespace ppms
