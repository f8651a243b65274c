#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "m6/assembler.h"
#include "m6/config.h"
#include "m6/schema.h"

namespace m6 {

struct TrackCurve {
  std::string label;  // "entry:section:role"
  std::vector<double> best_per_generation;
};

struct SongResult {
  std::vector<TrackSet> tracksets;  // one per arrangement entry
  std::vector<TrackCurve> curves;   // evolved tracks only
};

// Generates every track of every arrangement entry. Deterministic for a fixed
// seed; each track draws from its own stream keyed by (seed, section id,
// entry index, track index) so edits to one section leave the others intact.
// Chord tracks are generated first, then bass, then the rest, so the harmony
// references are fixed before anything scores against them.
SongResult build_song(const Composition& composition, const EngineConfig& config,
                      uint64_t seed);

}  // namespace m6
