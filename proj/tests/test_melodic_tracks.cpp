#include <doctest.h>

#include <algorithm>

#include "m6/melodic_tracks.h"

using namespace m6;

namespace {

Section make_section(std::vector<const char*> chords, const char* ts = "4/4") {
  Section section;
  section.bpm = 120;
  const std::string text(ts);
  const auto slash = text.find('/');
  section.time_signature = {std::stoi(text.substr(0, slash)),
                            std::stoi(text.substr(slash + 1))};
  section.scale = {0, ScaleKind::Major};
  for (const char* chord : chords) section.chord_progression.push_back(resolve_chord(chord));
  section.measures = static_cast<int>(chords.size());
  return section;
}

GaConfig small_ga(uint64_t seed) {
  GaConfig cfg;
  cfg.population_size = 32;
  cfg.generations = 10;
  cfg.rng_seed = seed;
  return cfg;
}

NoteSeq run_mode(MelodicMode mode, const Section& section, Emotion emotion, uint64_t seed) {
  const HarmonicContext ctx =
      HarmonicContext::for_section(section, section.measures);
  return generate_track(mode, section, emotion, ctx, {}, small_ga(seed));
}

}  // namespace

TEST_SUITE("melodic_tracks") {

TEST_CASE("eleven modes map onto the four track families") {
  CHECK(family_of(MelodicMode::Melody) == TrackFamily::Melody);
  CHECK(family_of(MelodicMode::Solo) == TrackFamily::Solo);
  for (MelodicMode mode : {MelodicMode::ShortRiff, MelodicMode::LongRiff,
                           MelodicMode::Bassline, MelodicMode::RepetitiveBassline}) {
    CHECK(family_of(mode) == TrackFamily::Bass);
  }
  for (MelodicMode mode :
       {MelodicMode::LongMotif, MelodicMode::OpeningMotif, MelodicMode::ClosingMotif,
        MelodicMode::RepeatedMotif, MelodicMode::ShortRepeatedMotif}) {
    CHECK(family_of(mode) == TrackFamily::Motif);
  }
}

TEST_CASE("target table covers every feature exactly once") {
  std::array<int, kFeatureCount> seen{};
  for (const TargetRow& row : target_table()) ++seen[static_cast<size_t>(row.feature)];
  for (int i = 0; i < kFeatureCount; ++i) CHECK(seen[static_cast<size_t>(i)] == 1);
}

TEST_CASE("neutral melody picks the Low base for unique notes") {
  // The documented base mapping for this check uses the Low anchor 0.2.
  LevelParams anchors;
  anchors.level_low = 0.2;
  const FitnessSpec spec = build_fitness_spec(MelodicMode::Melody, 0.0, 0.5, anchors);
  CHECK(spec.targets[kUniqueNotesPerMeasure].mu == doctest::Approx(0.2));
  CHECK(spec.targets[kUniqueNotesPerMeasure].weight > 0.0);
}

TEST_CASE("solo wants a wider pitch range than melody") {
  const FitnessSpec melody = build_fitness_spec(MelodicMode::Melody, 0.0, 0.5);
  const FitnessSpec solo = build_fitness_spec(MelodicMode::Solo, 0.0, 0.5);
  CHECK(solo.targets[kPitchRange].mu > melody.targets[kPitchRange].mu);
}

TEST_CASE("dissonance target falls as valence rises") {
  const FitnessSpec sad = build_fitness_spec(MelodicMode::Melody, -1.0, 0.5);
  const FitnessSpec happy = build_fitness_spec(MelodicMode::Melody, 1.0, 0.5);
  CHECK(happy.targets[kDissonantIntervalRatio].mu < sad.targets[kDissonantIntervalRatio].mu);
}

TEST_CASE("unused cells get zero weight") {
  const FitnessSpec melody = build_fitness_spec(MelodicMode::Melody, 0.0, 0.5);
  CHECK(melody.targets[kRootNoteMeasureStarts].weight == 0.0);
  const FitnessSpec bass = build_fitness_spec(MelodicMode::ShortRiff, 0.0, 0.5);
  CHECK(bass.targets[kRestRatio].weight == 0.0);
  CHECK(bass.targets[kRootNoteMeasureStarts].weight > 0.0);
}

TEST_CASE("targets stay in range and move monotonically with the declared directions") {
  for (MelodicMode mode : {MelodicMode::Melody, MelodicMode::Solo, MelodicMode::ShortRiff,
                           MelodicMode::LongMotif}) {
    const TrackFamily family = family_of(mode);
    for (const TargetRow& row : target_table()) {
      double previous_v = -2.0, previous_a = -2.0;
      for (double x = -1.0; x <= 1.001; x += 0.25) {
        const FitnessSpec by_valence = build_fitness_spec(mode, x, 0.5);
        const FitnessSpec by_arousal = build_fitness_spec(mode, 0.0, (x + 1.0) / 2.0);
        const double mu_v = by_valence.targets[static_cast<size_t>(row.feature)].mu;
        const double mu_a = by_arousal.targets[static_cast<size_t>(row.feature)].mu;
        CHECK(mu_v >= 0.0);
        CHECK(mu_v <= 1.0);
        if (previous_v > -2.0) {
          if (row.valence_dir > 0) CHECK(mu_v >= previous_v - 1e-12);
          if (row.valence_dir < 0) CHECK(mu_v <= previous_v + 1e-12);
          if (row.arousal_dir > 0) CHECK(mu_a >= previous_a - 1e-12);
          if (row.arousal_dir < 0) CHECK(mu_a <= previous_a + 1e-12);
        }
        previous_v = mu_v;
        previous_a = mu_a;
      }
      (void)family;
    }
  }
}

TEST_CASE("short riff copies follow the chord roots") {
  const Section section = make_section({"C", "F", "C", "F"});
  const NoteSeq track = run_mode(MelodicMode::ShortRiff, section, {0.0, 0.5}, 21);
  const int spm = 16;
  // measure 2 must be measure 1 transposed by +5 (C -> F)
  for (int i = 0; i < spm; ++i) {
    const int a = track.codes[static_cast<size_t>(i)];
    const int b = track.codes[static_cast<size_t>(spm + i)];
    if (a >= 0) {
      CHECK(b == a + 5);
    } else {
      CHECK(b == a);
    }
  }
  // measure 3 is measure 1 again
  for (int i = 0; i < spm; ++i) {
    CHECK(track.codes[static_cast<size_t>(2 * spm + i)] == track.codes[static_cast<size_t>(i)]);
  }
}

TEST_CASE("tiled copies are exact transpositions of the unit") {
  for (MelodicMode mode : {MelodicMode::ShortRiff, MelodicMode::LongMotif}) {
    const Section section = make_section({"C", "G", "Am", "F"});
    const NoteSeq track = run_mode(mode, section, {0.2, 0.6}, 33);
    const int spm = 16;
    for (int m = 1; m < 4; ++m) {
      int delta = 1000;
      for (int i = 0; i < spm; ++i) {
        const int a = track.codes[static_cast<size_t>(i)];
        const int b = track.codes[static_cast<size_t>(m * spm + i)];
        if (a >= 0) {
          REQUIRE(b >= 0);
          if (delta == 1000) delta = b - a;
          CHECK(b - a == delta);
        } else {
          CHECK(b == a);
        }
      }
    }
  }
}

TEST_CASE("opening motif sounds only in the first half of each measure") {
  const Section section = make_section({"C", "F", "Am", "F"});
  const NoteSeq track = run_mode(MelodicMode::OpeningMotif, section, {0.0, 0.5}, 4);
  const int spm = 16;
  for (int m = 0; m < 4; ++m) {
    for (int i = (spm + 1) / 2; i < spm; ++i) {
      CHECK(track.codes[static_cast<size_t>(m * spm + i)] == kRestCode);
    }
  }
}

TEST_CASE("closing motif mirrors the opening motif") {
  const Section section = make_section({"C", "F"});
  const NoteSeq track = run_mode(MelodicMode::ClosingMotif, section, {0.0, 0.5}, 4);
  const int spm = 16;
  for (int m = 0; m < 2; ++m) {
    for (int i = 0; i < spm - (spm + 1) / 2; ++i) {
      CHECK(track.codes[static_cast<size_t>(m * spm + i)] == kRestCode);
    }
  }
}

TEST_CASE("short repeated motif tiles 4+4+4+2 in 7/8") {
  const Section section = make_section({"C", "F"}, "7/8");
  const NoteSeq track = run_mode(MelodicMode::ShortRepeatedMotif, section, {0.0, 0.5}, 6);
  const int spm = 14;
  REQUIRE(track.length() == 2 * spm);
  // within each measure, offsets 4 and 8 restate the unit; offset 12 holds
  // its first two steps only
  for (int m = 0; m < 2; ++m) {
    const int base = m * spm;
    for (int copy : {4, 8}) {
      for (int i = 0; i < 4; ++i) {
        CHECK(track.codes[static_cast<size_t>(base + copy + i)] ==
              track.codes[static_cast<size_t>(base + i)]);
      }
    }
    for (int i = 0; i < 2; ++i) {
      CHECK(track.codes[static_cast<size_t>(base + 12 + i)] ==
            track.codes[static_cast<size_t>(base + i)]);
    }
  }
}

TEST_CASE("repeated motif restates its half-measure unit") {
  const Section section = make_section({"C", "F", "Am", "F"});
  const NoteSeq track = run_mode(MelodicMode::RepeatedMotif, section, {0.0, 0.5}, 10);
  const int spm = 16;
  for (int m = 0; m < 4; ++m) {
    for (int i = 0; i < 8; ++i) {
      CHECK(track.codes[static_cast<size_t>(m * spm + 8 + i)] ==
            track.codes[static_cast<size_t>(m * spm + i)]);
    }
  }
}

TEST_CASE("bass modes never sound above MIDI 60") {
  for (MelodicMode mode : {MelodicMode::ShortRiff, MelodicMode::LongRiff,
                           MelodicMode::Bassline, MelodicMode::RepetitiveBassline}) {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
      const Section section = make_section({"C", "F", "Am", "F"});
      const NoteSeq track = run_mode(mode, section, {0.3, 0.8}, seed);
      for (int code : track.codes) {
        if (code >= 0) CHECK(code < 60);
      }
    }
  }
}

TEST_CASE("motif modes never sound below MIDI 60") {
  for (MelodicMode mode : {MelodicMode::LongMotif, MelodicMode::OpeningMotif,
                           MelodicMode::RepeatedMotif, MelodicMode::ShortRepeatedMotif}) {
    const Section section = make_section({"C", "F", "Am", "F"});
    const NoteSeq track = run_mode(mode, section, {-0.5, 0.4}, 17);
    for (int code : track.codes) {
      if (code >= 0) CHECK(code > 60);
    }
  }
}

TEST_CASE("bassline plays the chord root in octave 2 on each downbeat") {
  const Section section = make_section({"C", "F", "Am", "F"});
  const NoteSeq track = run_mode(MelodicMode::Bassline, section, {0.0, 0.0}, 17);
  // arousal 0 -> no mutations, transitions possible but downbeats intact
  const int expected[] = {36, 41, 45, 41};
  for (int m = 0; m < 4; ++m) {
    CHECK(track.codes[static_cast<size_t>(m * 16)] == expected[m]);
  }
}

TEST_CASE("generate_track output always fits the section grid") {
  const Section section = make_section({"C", "G", "Am", "F"}, "7/8");
  const HarmonicContext ctx = HarmonicContext::for_section(section, section.measures);
  for (int mode = 0; mode < 11; ++mode) {
    const NoteSeq track = generate_track(static_cast<MelodicMode>(mode), section, {0.1, 0.6},
                                         ctx, {}, small_ga(100 + static_cast<uint64_t>(mode)));
    CHECK(track.valid());
    CHECK(track.length() == 4 * 14);
    CHECK(track.steps_per_measure == 14);
  }
}

TEST_CASE("fold_into_band preserves pitch classes") {
  NoteSeq seq = make_note_seq({0, 127, 60, -1, -2, 45, 80, 3}, 8, 1);
  const NoteSeq before = seq;
  fold_into_band(seq, 48, 95);
  for (size_t i = 0; i < seq.codes.size(); ++i) {
    if (before.codes[i] < 0) {
      CHECK(seq.codes[i] == before.codes[i]);
    } else {
      CHECK(seq.codes[i] % 12 == before.codes[i] % 12);
      CHECK(seq.codes[i] >= 48);
      CHECK(seq.codes[i] <= 95);
    }
  }
}

}  // TEST_SUITE
