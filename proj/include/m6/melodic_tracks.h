#pragma once

#include <vector>

#include "m6/config.h"
#include "m6/evolution.h"
#include "m6/notation.h"

namespace m6 {

struct Emotion {
  double valence = 0.0;  // [-1, 1]
  double arousal = 0.5;  // [0, 1]
};

// Track families sharing one column of the target table.
enum class TrackFamily { Melody, Solo, Bass, Motif };
TrackFamily family_of(MelodicMode mode);

enum class TargetLevel { Unused, Zero, Low, Med, High };
enum class EmotionImpact { None, Low, Med, High };

struct TargetRow {
  int feature;  // Feature enum value
  TargetLevel melody, solo, bass, motif;
  EmotionImpact impact;
  int valence_dir;  // +1 proportional, -1 inverse, 0 none
  int arousal_dir;
};

// The full desired-value table, one row per fitness feature. Mirrored by
// data/target_table.json so the two can be diffed.
const std::vector<TargetRow>& target_table();

// Register bands (MIDI pitch, inclusive) per family. Bass stays below middle
// C, motifs above it.
struct RegisterBand {
  int low;
  int high;
};
RegisterBand register_band(TrackFamily family);

// mu = level + impact * (v_dir * valence + a_dir * (2 * arousal - 1)),
// clamped to [0, 1]; unused cells get weight 0.
FitnessSpec build_fitness_spec(MelodicMode mode, double valence, double arousal,
                               const LevelParams& levels = {});

// Evolves a sequence for the mode and applies its structural rule (tiling,
// chord-root shifting, half-measure masking, bassline construction).
// `refs` are already-generated tracks scored by the harmony term.
NoteSeq generate_track(MelodicMode mode, const Section& section, Emotion emotion,
                       const HarmonicContext& ctx, const std::vector<NoteSeq>& refs,
                       const GaConfig& cfg, const LevelParams& levels = {},
                       EvolveStats* stats = nullptr);

// Octave-folds every sounded pitch into [low, high] (pitch class preserved
// when the band is at least an octave wide).
void fold_into_band(NoteSeq& seq, int low, int high);

}  // namespace m6
