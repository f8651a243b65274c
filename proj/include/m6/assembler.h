#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "m6/notation.h"
#include "m6/schema.h"

namespace m6 {

// 480 ticks per quarter note; the sixteenth grid lands on 120-tick steps.
inline constexpr int kTicksPerQuarter = 480;
inline constexpr int kTicksPerStep = kTicksPerQuarter / 4;

inline constexpr uint8_t kMelodicVelocity = 96;
inline constexpr uint8_t kAccentVelocity = 110;  // crash and kick hits
inline constexpr uint8_t kDrumVelocity = 80;
inline constexpr uint8_t kDrumChannel = 9;

struct NoteEvent {
  int tick = 0;
  bool on = true;
  uint8_t pitch = 0;
  uint8_t velocity = 0;
};

struct TrackEvents {
  std::string name;
  uint8_t channel = 0;
  int program = -1;  // -1 emits no program change (percussion)
  std::vector<NoteEvent> events;
};

// All tracks of one arrangement entry, already expanded over repeats.
struct TrackSet {
  std::string section_id;
  TimeSignature time_signature;
  int bpm = 120;
  int duration_ticks = 0;
  std::vector<TrackEvents> tracks;
};

// Grid voices to note on/off events at fixed velocity. Simultaneous onsets
// order by pitch; note-offs precede note-ons at the same tick.
std::vector<NoteEvent> merge_voices(std::span<const NoteSeq> voices, uint8_t velocity);

// Standard MIDI File, format 1: a conductor track carrying tempo and
// time-signature metas at every section boundary, then one track per
// TrackEvents entry. Throws std::invalid_argument when an event overruns its
// section (an upstream bug).
std::vector<uint8_t> assemble(const Composition& composition,
                              const std::vector<TrackSet>& tracksets);

}  // namespace m6
