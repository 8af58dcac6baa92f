#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ctdvp {

// Seedable random source used everywhere randomness is needed.
//
// The engine is mt19937_64, whose output stream is pinned by the standard,
// so runs reproduce bit-for-bit across platforms. std::uniform_int_distribution
// is implementation-defined and must not be used; draw through the helpers
// below instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  static constexpr const char* algorithm() { return "mt19937_64"; }

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, n) via rejection sampling.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  // 53-bit uniform in [0, 1).
  double uniform_real01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stream seed for an independent sub-run (sweep member, worker).
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view tag) {
  return splitmix64(base_seed ^ fnv1a64(tag));
}

}  // namespace ctdvp
