#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "m6/schema.h"

namespace m6 {

// Grid codes: a MIDI pitch 0-127 starts a note, kRestCode is one silent step,
// kExtendCode prolongs whatever precedes it (note or rest) by one step.
inline constexpr int kRestCode = -1;
inline constexpr int kExtendCode = -2;

struct NoteSeq {
  std::vector<int> codes;
  int steps_per_measure = 16;
  int measures = 1;

  int length() const { return static_cast<int>(codes.size()); }
  bool operator==(const NoteSeq&) const = default;

  // length == steps_per_measure * measures, codes within {-2, -1, 0..127},
  // and codes[0] != kExtendCode.
  bool valid() const;
};

NoteSeq make_note_seq(std::vector<int> codes, int steps_per_measure, int measures);

struct SoundedNote {
  int pitch = 0;
  int onset = 0;     // step index
  int duration = 1;  // steps: 1 + number of immediately following extensions
};

// Notes in onset order; rests excluded. Durations + rest steps = length.
std::vector<SoundedNote> sounded_notes(const NoteSeq& seq);

// ---------------------------------------------------------------------------
// Fitness features
// ---------------------------------------------------------------------------

inline constexpr int kFeatureCount = 21;

enum Feature : int {
  kUniqueNotesPerMeasure = 0,
  kUniqueIntervalsPerMeasure,
  kDissonantIntervalRatio,
  kOverOctaveIntervalRatio,
  kInScaleRatio,
  kInChordRatio,
  kPitchRange,
  kRestRatio,
  kUniqueLengthsPerMeasure,
  kAvgPitch,
  kPitchDeviation,
  kStrongBeatLength,
  kMelodicContour,
  kOffbeatRatio,
  kAvgIntervalSize,
  kLogAvgNoteLength,
  kLogLengthDeviation,
  kStepwiseIntervalRuns,
  kShortNoteRuns,
  kRepeatedFragmentLength,
  kRootNoteMeasureStarts,
};

using FeatureVector = std::array<double, kFeatureCount>;

const char* feature_name(int feature);

// Dissonant interval classes (semitones mod 12). Matches the penalty rows of
// the cross-track interval scorer so both judges agree on what grates.
bool is_dissonant_interval(int semitones);

// Per-step harmonic information aligned with a note grid.
struct HarmonicContext {
  Scale scale;
  std::vector<ChordSymbol> chord_per_step;

  // Caches derived from the fields above.
  uint16_t scale_mask = 0;
  std::vector<uint16_t> chord_mask;
  std::vector<uint8_t> chord_root;

  static HarmonicContext make(const Scale& scale, std::vector<ChordSymbol> chord_per_step);
  // Cycled one-chord-per-measure context covering `measures` measures.
  static HarmonicContext for_section(const Section& section, int measures);
  // First `steps` steps (for evolving short tiled units).
  HarmonicContext prefix(int steps) const;

  int steps() const { return static_cast<int>(chord_per_step.size()); }
  bool in_scale(int pitch) const { return (scale_mask >> (pitch % 12)) & 1u; }
  bool in_chord(int pitch, int step) const {
    return (chord_mask[static_cast<size_t>(step)] >> (pitch % 12)) & 1u;
  }
};

// All 21 features, each normalized to [0, 1]. Pure function. Features whose
// denominator is empty (no notes, no intervals) return 0. The exact formulas
// are documented next to each block in the implementation; they are part of
// this module's contract.
FeatureVector extract_features(const NoteSeq& seq, const HarmonicContext& ctx);

}  // namespace m6
