#pragma once

#include <cstdint>
#include <string_view>

namespace hatmatch {

// SplitMix64 finalizer. Used to derive reproducible, platform-independent
// random keys; std::uniform_*_distribution is implementation-defined.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Key for (seed, a, b): stable across runs, input order and platforms.
constexpr std::uint64_t keyed_hash(std::uint64_t seed, std::string_view a,
                                   std::string_view b = {}) noexcept {
  return mix64(mix64(seed ^ fnv1a64(a)) ^ fnv1a64(b));
}

// Small deterministic generator (SplitMix64 stream) with portable
// uniform/normal/Poisson draws. Same seed gives the same stream everywhere.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  // Uniform integer in [lo, hi] (inclusive); small bias is irrelevant here.
  int uniform_int(int lo, int hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }

  double normal() noexcept;
  int poisson(double mean) noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace hatmatch
