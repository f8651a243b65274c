#pragma once

#include <vector>

#include "m6/notation.h"
#include "m6/rng.h"
#include "m6/schema.h"

namespace m6 {

struct Voicing {
  std::vector<int> pitches;  // strictly ascending MIDI notes

  double center_of_gravity() const;
};

// Arousal-driven voicing size. Rules applied in order, each at most once:
// below 0.3 or more than 4 notes -> drop the fifth; above 0.7 and under 5
// notes -> add the root an octave up; above 0.9 and under 6 notes -> add the
// fifth an octave up. Returns semitone offsets from the chord root.
std::vector<int> size_voicing(const ChordSymbol& chord, double arousal);

// Places the degrees in octaves so the center of gravity lands as close as
// possible to the valence target (A2 at -1, A4 at +1), searching +-2 octaves
// per note under a strictly-ascending (all distinct) constraint. Ties break
// toward the lower voicing.
Voicing place_voicing(int root_pc, const std::vector<int>& degrees, double valence);

// A chord track is a bundle of parallel single-note voices on the shared
// grid; voice 0 is the lowest.
struct ChordTrack {
  std::vector<NoteSeq> voices;
};

// Renders one voicing per measure in the chosen playback mode. Continuous
// sustains, Repeated strikes with arousal-driven length/gaps (repetitions
// beyond the first may be omitted), Arpeggio runs up and down the voicing.
ChordTrack realize_mode(const std::vector<Voicing>& voicing_per_measure, ChordPlayMode mode,
                        double arousal, const TimeSignature& ts, Rng& rng);

// Convenience: size + place + realize for a whole section.
ChordTrack generate_chord_track(const Section& section, int measures, ChordPlayMode mode,
                                double valence, double arousal, Rng& rng);

}  // namespace m6
