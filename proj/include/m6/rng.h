#pragma once

#include <cstdint>
#include <string_view>

namespace m6 {

// Deterministic PRNG with bit-stable output across platforms and standard
// libraries. std::uniform_int_distribution is implementation-defined, so every
// random draw in the engine goes through this wrapper instead.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}

  // splitmix64 step
  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  int uniform_int(int lo, int hi);

  // Uniform double in [0, 1).
  double uniform_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform_double() < p; }

  // Picks an index in [0, n) or -1 when n == 0.
  int pick_index(int n) { return n > 0 ? uniform_int(0, n - 1) : -1; }

 private:
  uint64_t state_;
};

uint64_t hash_combine(uint64_t seed, uint64_t value);
uint64_t hash_str(std::string_view s);

// Independent stream seed for one track of one arrangement entry. Streams
// depend only on (seed, section id, entry index, track index) so editing one
// section never disturbs another section's draws.
uint64_t derive_seed(uint64_t seed, std::string_view section_id,
                     int arrangement_index, int track_index);

}  // namespace m6
