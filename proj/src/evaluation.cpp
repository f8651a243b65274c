#include "m6/evaluation.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "m6/rng.h"

namespace m6 {

double pitch_class_entropy(std::span<const int> pitches) {
  if (pitches.empty()) throw std::invalid_argument("pitch_class_entropy: no notes");
  std::array<double, 12> histogram{};
  for (int pitch : pitches) histogram[static_cast<size_t>(((pitch % 12) + 12) % 12)] += 1.0;
  double entropy = 0.0;
  for (double count : histogram) {
    if (count <= 0.0) continue;
    const double p = count / static_cast<double>(pitches.size());
    entropy -= p * std::log2(p);
  }
  return entropy;
}

double scale_consistency(std::span<const int> pitches) {
  if (pitches.empty()) throw std::invalid_argument("scale_consistency: no notes");
  std::array<int, 12> histogram{};
  for (int pitch : pitches) ++histogram[static_cast<size_t>(((pitch % 12) + 12) % 12)];

  double best = 0.0;
  for (ScaleKind kind : {ScaleKind::Major, ScaleKind::NaturalMinor}) {
    for (int root = 0; root < 12; ++root) {
      const uint16_t mask = Scale{root, kind}.mask();
      int members = 0;
      for (int pc = 0; pc < 12; ++pc) {
        if ((mask >> pc) & 1) members += histogram[static_cast<size_t>(pc)];
      }
      best = std::max(best, static_cast<double>(members));
    }
  }
  return best / static_cast<double>(pitches.size()) * 100.0;
}

double groove_consistency(std::span<const int64_t> onsets, int64_t measure_length) {
  if (measure_length <= 0) throw std::invalid_argument("groove_consistency: bad measure length");
  int64_t n_measures = 0;
  for (int64_t onset : onsets) n_measures = std::max(n_measures, onset / measure_length + 1);
  if (n_measures < 2) throw std::invalid_argument("groove_consistency: needs 2 measures");

  std::unordered_set<int64_t> onset_set(onsets.begin(), onsets.end());
  int64_t hamming = 0;
  for (int64_t m = 0; m + 1 < n_measures; ++m) {
    for (const int64_t onset : onset_set) {
      const int64_t measure = onset / measure_length;
      if (measure != m && measure != m + 1) continue;
      const int64_t position = onset % measure_length;
      const bool in_first = onset_set.contains(m * measure_length + position);
      const bool in_second = onset_set.contains((m + 1) * measure_length + position);
      if (in_first != in_second) ++hamming;
    }
  }
  // Each differing position was visited once (it exists in exactly one of the
  // two measures), so no double counting correction is needed.
  const double mean_distance =
      static_cast<double>(hamming) / static_cast<double>(measure_length * (n_measures - 1));
  return (1.0 - mean_distance) * 100.0;
}

// ---------------------------------------------------------------------------
// Scenario compositions
// ---------------------------------------------------------------------------

namespace {

TrackSpec make_track(TrackRole role, int program, MelodicMode mode) {
  TrackSpec track;
  track.role = role;
  track.program = program;
  track.melodic_mode = mode;
  track.instrument_name = gm_program_name(program);
  return track;
}

TrackSpec make_chords(int program, ChordPlayMode mode) {
  TrackSpec track;
  track.role = TrackRole::Chords;
  track.program = program;
  track.chord_mode = mode;
  track.instrument_name = gm_program_name(program);
  return track;
}

TrackSpec make_drums(DrumKit kit, DrumMode mode) {
  TrackSpec track;
  track.role = TrackRole::Drums;
  track.kit = kit;
  track.drum_mode = mode;
  track.instrument_name = drum_kit_name(kit);
  return track;
}

Section standard_section(std::vector<TrackSpec> tracks, int repeats) {
  Section section;
  section.bpm = 120;
  section.time_signature = {4, 4};
  section.scale = {0, ScaleKind::Major};
  for (const char* symbol : {"C", "F", "Am", "F"}) {
    section.chord_progression.push_back(resolve_chord(symbol));
  }
  section.measures = 4;
  section.repeats = repeats;
  section.tracks = std::move(tracks);
  return section;
}

}  // namespace

Composition focused_composition() {
  // A standardized full song: every parameter pinned, several sections so the
  // corpus resembles complete pieces rather than a single loop.
  Composition composition;
  composition.name = "focused";
  composition.sections.emplace(
      "intro", standard_section({make_chords(48, ChordPlayMode::Arpeggio),
                                 make_track(TrackRole::Motif, 11, MelodicMode::LongMotif),
                                 make_track(TrackRole::Bass, 33, MelodicMode::Bassline)},
                                1));
  composition.sections.emplace(
      "verse", standard_section({make_chords(48, ChordPlayMode::Continuous),
                                 make_track(TrackRole::Bass, 33, MelodicMode::Bassline),
                                 make_track(TrackRole::Melody, 0, MelodicMode::Melody),
                                 make_drums(DrumKit::Standard, DrumMode::Standard)},
                                2));
  composition.sections.emplace(
      "chorus", standard_section({make_chords(48, ChordPlayMode::Repeated),
                                  make_track(TrackRole::Bass, 33, MelodicMode::ShortRiff),
                                  make_track(TrackRole::Melody, 73, MelodicMode::Melody),
                                  make_track(TrackRole::Motif, 11, MelodicMode::RepeatedMotif),
                                  make_drums(DrumKit::Standard, DrumMode::Standard)},
                                 2));
  composition.arrangement.push_back({"intro", 0.0, 0.5});
  composition.arrangement.push_back({"verse", 0.0, 0.5});
  composition.arrangement.push_back({"chorus", 0.0, 0.5});
  composition.arrangement.push_back({"verse", 0.0, 0.5});
  composition.arrangement.push_back({"chorus", 0.0, 0.5});
  return composition;
}

Composition randomized_composition(Rng& rng) {
  Section section;
  section.bpm = rng.uniform_int(60, 180);

  static const TimeSignature kMeters[] = {{4, 4}, {4, 4}, {3, 4}, {5, 4},
                                          {6, 8}, {7, 8}, {9, 8}, {4, 4}};
  section.time_signature = kMeters[rng.uniform_int(0, 7)];

  // Seven-note kinds so diatonic triads are well defined.
  section.scale.root = rng.uniform_int(0, 11);
  section.scale.kind = static_cast<ScaleKind>(rng.uniform_int(0, 8));
  const std::vector<int> member_pcs = section.scale.pitch_classes();

  static const char* kPitchNames[12] = {"C",  "C#", "D",  "D#", "E",  "F",
                                        "F#", "G",  "G#", "A",  "A#", "B"};
  const int n_chords = rng.uniform_int(2, 4);
  for (int i = 0; i < n_chords; ++i) {
    const int degree = rng.uniform_int(0, 6);
    const int root = member_pcs[static_cast<size_t>(degree)];
    const int third = member_pcs[static_cast<size_t>((degree + 2) % 7)];
    const int fifth = member_pcs[static_cast<size_t>((degree + 4) % 7)];
    const int t = ((third - root) % 12 + 12) % 12;
    const int f = ((fifth - root) % 12 + 12) % 12;
    std::string symbol = kPitchNames[root];
    if (t == 3 && f == 6) {
      symbol += "dim";
    } else if (t == 4 && f == 8) {
      symbol += "aug";
    } else if (t == 3) {
      symbol += "m";
    }
    section.chord_progression.push_back(resolve_chord(symbol));
  }
  section.measures = 4;
  section.repeats = rng.uniform_int(1, 2);

  TrackSpec melody;
  melody.role = TrackRole::Melody;
  melody.program = rng.uniform_int(0, 95);
  melody.melodic_mode = rng.bernoulli(0.3) ? MelodicMode::Solo : MelodicMode::Melody;
  melody.instrument_name = gm_program_name(melody.program);
  TrackSpec bass;
  bass.role = TrackRole::Bass;
  bass.program = 32 + rng.uniform_int(0, 7);
  static const MelodicMode kBassModes[] = {MelodicMode::ShortRiff, MelodicMode::LongRiff,
                                           MelodicMode::Bassline,
                                           MelodicMode::RepetitiveBassline};
  bass.melodic_mode = kBassModes[rng.uniform_int(0, 3)];
  bass.instrument_name = gm_program_name(bass.program);
  TrackSpec chords;
  chords.role = TrackRole::Chords;
  chords.program = rng.uniform_int(0, 95);
  static const ChordPlayMode kChordModes[] = {ChordPlayMode::Continuous,
                                              ChordPlayMode::Repeated,
                                              ChordPlayMode::Arpeggio};
  chords.chord_mode = kChordModes[rng.uniform_int(0, 2)];
  chords.instrument_name = gm_program_name(chords.program);
  TrackSpec drums;
  drums.role = TrackRole::Drums;
  drums.kit = static_cast<DrumKit>(rng.uniform_int(0, 2));
  drums.drum_mode = DrumMode::Standard;
  drums.instrument_name = drum_kit_name(drums.kit);
  section.tracks = {chords, bass, melody, drums};

  Composition composition;
  composition.name = "randomized";
  composition.sections.emplace("main", std::move(section));
  composition.arrangement.push_back(
      {"main", rng.uniform_double() * 2.0 - 1.0, rng.uniform_double()});
  return composition;
}

// ---------------------------------------------------------------------------
// Song evaluation
// ---------------------------------------------------------------------------

SongMetrics evaluate_song(const Composition& composition, const SongResult& song) {
  std::vector<int> melodic_pitches;
  std::vector<int64_t> onsets;
  int64_t section_start = 0;
  int64_t ticks_per_measure = 0;
  for (const TrackSet& trackset : song.tracksets) {
    const Section& section = composition.section(trackset.section_id);
    ticks_per_measure =
        static_cast<int64_t>(section.steps_per_measure()) * kTicksPerStep;
    for (const TrackEvents& track : trackset.tracks) {
      for (const NoteEvent& event : track.events) {
        if (!event.on) continue;
        onsets.push_back(section_start + event.tick);
        if (track.channel != kDrumChannel) melodic_pitches.push_back(event.pitch);
      }
    }
    section_start += trackset.duration_ticks;
  }

  SongMetrics metrics;
  metrics.entropy = pitch_class_entropy(melodic_pitches);
  metrics.scale = scale_consistency(melodic_pitches);
  metrics.groove = groove_consistency(onsets, ticks_per_measure);
  return metrics;
}

namespace {

MetricStats stats_of(const std::vector<double>& values) {
  MetricStats stats;
  const double n = static_cast<double>(values.size());
  for (double v : values) stats.mean += v;
  stats.mean /= n;
  if (values.size() > 1) {
    double var = 0.0;
    for (double v : values) var += (v - stats.mean) * (v - stats.mean);
    var /= (n - 1.0);
    stats.ci95 = 1.96 * std::sqrt(var / n);
  }
  return stats;
}

}  // namespace

ScenarioReport evaluate_compositions(const std::string& scenario_name,
                                     const std::vector<Composition>& compositions,
                                     uint64_t seed, const EngineConfig& config) {
  std::vector<double> entropies, scales, grooves;
  for (size_t i = 0; i < compositions.size(); ++i) {
    const uint64_t song_seed = hash_combine(seed, i + 1);
    const SongResult song = build_song(compositions[i], config, song_seed);
    const SongMetrics metrics = evaluate_song(compositions[i], song);
    entropies.push_back(metrics.entropy);
    scales.push_back(metrics.scale);
    grooves.push_back(metrics.groove);
  }
  ScenarioReport report;
  report.scenario = scenario_name;
  report.n_songs = static_cast<int>(compositions.size());
  report.seed = seed;
  report.pitch_class_entropy = stats_of(entropies);
  report.scale_consistency = stats_of(scales);
  report.groove_consistency = stats_of(grooves);
  return report;
}

ScenarioReport run_scenario(ScenarioKind kind, int n_songs, uint64_t seed,
                            const EngineConfig& config) {
  std::vector<Composition> compositions;
  switch (kind) {
    case ScenarioKind::Focused:
      for (int i = 0; i < n_songs; ++i) compositions.push_back(focused_composition());
      return evaluate_compositions("focused", compositions, seed, config);
    case ScenarioKind::Randomized: {
      Rng rng(hash_combine(seed, hash_str("randomized")));
      for (int i = 0; i < n_songs; ++i) compositions.push_back(randomized_composition(rng));
      return evaluate_compositions("randomized", compositions, seed, config);
    }
    case ScenarioKind::PromptDriven:
      throw std::invalid_argument(
          "prompt_driven evaluation needs LLM-provided compositions; use the CLI");
  }
  throw std::invalid_argument("unknown scenario");
}

std::string ScenarioReport::to_json() const {
  nlohmann::json doc;
  doc["scenario"] = scenario;
  doc["n_songs"] = n_songs;
  doc["seed"] = seed;
  auto metric = [](const MetricStats& stats) {
    return nlohmann::json{{"mean", stats.mean}, {"ci95", stats.ci95}};
  };
  doc["pitch_class_entropy"] = metric(pitch_class_entropy);
  doc["scale_consistency_percent"] = metric(scale_consistency);
  doc["groove_consistency_percent"] = metric(groove_consistency);
  return doc.dump(2);
}

std::string ScenarioReport::to_csv() const {
  std::string out = "metric,mean,ci95\n";
  auto row = [&out](const char* name, const MetricStats& stats) {
    out += name;
    out += "," + std::to_string(stats.mean) + "," + std::to_string(stats.ci95) + "\n";
  };
  row("pitch_class_entropy", pitch_class_entropy);
  row("scale_consistency_percent", scale_consistency);
  row("groove_consistency_percent", groove_consistency);
  return out;
}

}  // namespace m6
