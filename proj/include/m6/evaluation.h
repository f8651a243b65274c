#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "m6/config.h"
#include "m6/schema.h"
#include "m6/song.h"

namespace m6 {

// Shannon entropy (base 2) of the 12-bin pitch-class histogram.
// Throws std::invalid_argument on empty input.
double pitch_class_entropy(std::span<const int> pitches);

// Best fraction of notes explainable by one of the 24 major/natural-minor
// scales, as a percentage.
double scale_consistency(std::span<const int> pitches);

// Mean similarity (1 - normalized Hamming distance of onset bit-vectors)
// between consecutive measures, as a percentage. Onsets and the measure
// length share one time unit, so callers choose the resolution (grid steps
// for toy inputs, MIDI ticks for song evaluation). Needs at least 2 measures.
double groove_consistency(std::span<const int64_t> onsets, int64_t measure_length);

enum class ScenarioKind { PromptDriven, Focused, Randomized };

struct MetricStats {
  double mean = 0.0;
  double ci95 = 0.0;
};

struct ScenarioReport {
  std::string scenario;
  int n_songs = 0;
  uint64_t seed = 0;
  MetricStats pitch_class_entropy;
  MetricStats scale_consistency;
  MetricStats groove_consistency;

  std::string to_json() const;
  std::string to_csv() const;
};

// Standardized structure: 4/4, 120 bpm, C-F-Am-F in C major, neutral
// emotions.
Composition focused_composition();
// Random meter/scale/emotions; chords are diatonic triads of the drawn scale.
Composition randomized_composition(Rng& rng);

// Metrics for one generated song: pitch metrics over melodic tracks only,
// groove over every track's onsets at tick resolution.
struct SongMetrics {
  double entropy = 0.0;
  double scale = 0.0;
  double groove = 0.0;
};
SongMetrics evaluate_song(const Composition& composition, const SongResult& song);

// Generates n songs per the scenario and reports mean with 95% confidence
// intervals. PromptDriven needs externally supplied compositions, so it is
// only reachable through evaluate_compositions.
ScenarioReport run_scenario(ScenarioKind kind, int n_songs, uint64_t seed,
                            const EngineConfig& config);
ScenarioReport evaluate_compositions(const std::string& scenario_name,
                                     const std::vector<Composition>& compositions,
                                     uint64_t seed, const EngineConfig& config);

}  // namespace m6
