#include "m6/rng.h"

namespace m6 {

int Rng::uniform_int(int lo, int hi) {
  const uint64_t range = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
  // Lemire multiply-shift reduction; bias is negligible for musical ranges.
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(range);
  return lo + static_cast<int>(static_cast<uint64_t>(wide >> 64));
}

uint64_t hash_combine(uint64_t seed, uint64_t value) {
  // boost-style mix with 64-bit golden ratio
  seed ^= value + 0x9e3779b97f4a7c15ull + (seed << 12) + (seed >> 4);
  return seed;
}

uint64_t hash_str(std::string_view s) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t derive_seed(uint64_t seed, std::string_view section_id,
                     int arrangement_index, int track_index) {
  uint64_t h = hash_combine(seed, hash_str(section_id));
  h = hash_combine(h, static_cast<uint64_t>(arrangement_index) + 1);
  h = hash_combine(h, static_cast<uint64_t>(track_index) + 1);
  return h;
}

}  // namespace m6
