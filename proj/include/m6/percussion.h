#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "m6/config.h"
#include "m6/melodic_tracks.h"
#include "m6/rng.h"
#include "m6/schema.h"

namespace m6 {

// One drum state is 12 bits, one per kit component, at sixteenth resolution.
// Component numbering is 1-based; bit i lives at (1 << (i - 1)).
enum DrumComponent : int {
  kClosedHat = 1,
  kOpenHat = 2,
  kKickDrum = 3,
  kSnareDrum = 4,
  kTomLowest = 5,   // toms run low to high through component 9
  kTomHighest = 9,
  kCrashCymbal = 10,
  kRideCymbal = 11,
  kRideBell = 12,
};

inline constexpr uint16_t component_bit(int component) {
  return static_cast<uint16_t>(1u << (component - 1));
}

// Components struck with hands (1, 2, and 5-12); the kick (3) and snare (4)
// are exempt from the two-hand limit.
inline constexpr uint16_t kHandBitsMask = 0b1111'1111'0011;
inline constexpr uint16_t kTomBitsMask = 0b0001'1111'0000;

struct DrumGrid {
  std::vector<uint16_t> states;
  int steps_per_measure = 16;
  int measures = 1;

  int length() const { return static_cast<int>(states.size()); }
};

// Kick/snare probability rows for one meter: one probability per beat.
struct BeatRow {
  std::vector<double> kick;
  std::vector<double> snare;
};

// Keyed by (beats per bar 2..9, beat unit 4 or 8).
class BeatTable {
 public:
  static BeatTable defaults();
  const BeatRow& row(int beats, int unit) const;
  bool has(int beats, int unit) const;
  void set(int beats, int unit, BeatRow row);
  const std::map<std::pair<int, int>, BeatRow>& rows() const { return rows_; }

 private:
  std::map<std::pair<int, int>, BeatRow> rows_;
};

// Markov chain over 5-bit tom-activation patterns.
struct FillChain {
  std::array<std::array<double, 32>, 32> transition{};

  static FillChain defaults();
  // Every row must sum to 1 within 1e-9.
  void validate() const;
  int step(int state, Rng& rng) const;
};

// Splits a numerator above 9 into table-covered parts, largest first
// (13 -> 7+6, 25 -> 13+12 -> 7+6+6+6). The unit is carried through unchanged.
// Throws std::invalid_argument when numerator < 2.
std::vector<std::pair<int, int>> decompose_signature(const TimeSignature& ts);

// Silent states inserted after every beat so the pattern lands on the
// sixteenth grid: 16 / unit - 1.
int pad_interval(int unit);

// One measure of drums: kick/snare from the beat table, hi-hats by arousal,
// open-hat/ride/bell/crash color, and fill material per mode. `final_measure`
// doubles the fill probability.
DrumGrid generate_measure(const TimeSignature& ts, Emotion emotion, DrumMode mode, Rng& rng,
                          const BeatTable& table, const FillChain& chain,
                          const DrumParams& params, bool final_measure = false);

// Markov walk mapped onto tom components; the snare doubles the lowest tom.
// `start_state` < 0 draws a random non-silent start.
DrumGrid generate_fill(int length_steps, const FillChain& chain, Rng& rng,
                       int start_state = -1);

// Realism pass: kick/snare echo, two-hand limit, sparsity thinning.
void post_process(DrumGrid& grid, Rng& rng, const DrumParams& params);

// (GM percussion note, step) events for every set bit under the given kit.
std::vector<std::pair<int, int>> map_to_kit(const DrumGrid& grid, DrumKit kit);
int kit_note(DrumKit kit, int component);

// Full drum track for a section: per-measure generation then one realism pass.
DrumGrid generate_drum_track(const Section& section, int measures, Emotion emotion,
                             DrumMode mode, Rng& rng, const BeatTable& table,
                             const FillChain& chain, const DrumParams& params);

}  // namespace m6
