#include <doctest.h>

#include <cmath>
#include <vector>

#include "m6/evaluation.h"

using namespace m6;

TEST_SUITE("evaluation") {

TEST_CASE("entropy of a single pitch class is zero") {
  const std::vector<int> notes(20, 60);
  CHECK(pitch_class_entropy(notes) == doctest::Approx(0.0));
}

TEST_CASE("uniform chromatic distribution reaches log2(12)") {
  std::vector<int> notes;
  for (int pc = 0; pc < 12; ++pc) notes.push_back(60 + pc);
  CHECK(pitch_class_entropy(notes) == doctest::Approx(std::log2(12.0)));
}

TEST_CASE("entropy is invariant under transposition") {
  std::vector<int> notes = {60, 62, 64, 65, 67, 67, 69, 71, 72, 60};
  const double base = pitch_class_entropy(notes);
  for (int shift : {1, 5, 12, 25}) {
    std::vector<int> shifted;
    for (int n : notes) shifted.push_back(n + shift);
    CHECK(pitch_class_entropy(shifted) == doctest::Approx(base));
  }
}

TEST_CASE("all-major-scale notes give 100 percent scale consistency") {
  std::vector<int> notes;
  for (int p = 48; p < 84; ++p) {
    if (Scale{0, ScaleKind::Major}.contains_pitch(p)) notes.push_back(p);
  }
  CHECK(scale_consistency(notes) == doctest::Approx(100.0));
}

TEST_CASE("uniform chromatic input matches the 7/12 brute force") {
  std::vector<int> notes;
  for (int pc = 0; pc < 12; ++pc) notes.push_back(36 + pc);
  // every major/minor scale holds exactly 7 of the 12 classes
  CHECK(scale_consistency(notes) == doctest::Approx(700.0 / 12.0));
}

TEST_CASE("scale consistency is invariant under transposition") {
  const std::vector<int> notes = {60, 62, 63, 65, 67, 68, 70, 61};
  const double base = scale_consistency(notes);
  for (int shift : {3, 7, 12}) {
    std::vector<int> shifted;
    for (int n : notes) shifted.push_back(n + shift);
    CHECK(scale_consistency(shifted) == doctest::Approx(base));
  }
}

TEST_CASE("metrics reject empty input") {
  CHECK_THROWS_AS(pitch_class_entropy({}), std::invalid_argument);
  CHECK_THROWS_AS(scale_consistency({}), std::invalid_argument);
}

TEST_CASE("identical measures give 100 percent groove consistency") {
  std::vector<int64_t> onsets;
  for (int m = 0; m < 4; ++m) {
    for (int64_t position : {0, 4, 8, 12}) onsets.push_back(m * 16 + position);
  }
  CHECK(groove_consistency(onsets, 16) == doctest::Approx(100.0));
}

TEST_CASE("alternating full and empty measures give zero groove consistency") {
  std::vector<int64_t> onsets;
  for (int m = 0; m < 4; m += 2) {
    for (int64_t position = 0; position < 16; ++position) onsets.push_back(m * 16 + position);
  }
  CHECK(groove_consistency(onsets, 16) == doctest::Approx(0.0));
}

TEST_CASE("groove consistency matches a direct bitset computation") {
  const std::vector<int64_t> onsets = {0, 2, 4, 8, 10, 12, 14, 17, 20};
  // measures: {0,2,4}, {0,2,4,6}, {1,4}
  // pair 1 differs at 6 -> 1/8; pair 2 differs at {0,1,2,6} -> 4/8
  const double expected = (1.0 - (1.0 / 8.0 + 4.0 / 8.0) / 2.0) * 100.0;
  CHECK(groove_consistency(onsets, 8) == doctest::Approx(expected));
}

TEST_CASE("groove consistency needs two measures") {
  CHECK_THROWS_AS(groove_consistency(std::vector<int64_t>{1, 2, 3}, 16),
                  std::invalid_argument);
}

TEST_CASE("focused scenario is deterministic for a fixed seed") {
  EngineConfig config;
  config.ga.population_size = 16;
  config.ga.generations = 3;
  const ScenarioReport a = run_scenario(ScenarioKind::Focused, 2, 5, config);
  const ScenarioReport b = run_scenario(ScenarioKind::Focused, 2, 5, config);
  CHECK(a.pitch_class_entropy.mean == b.pitch_class_entropy.mean);
  CHECK(a.scale_consistency.mean == b.scale_consistency.mean);
  CHECK(a.groove_consistency.mean == b.groove_consistency.mean);
  CHECK(a.n_songs == 2);
}

TEST_CASE("randomized scenario only draws chords inside the sampled scale") {
  Rng rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const Composition song = randomized_composition(rng);
    for (const auto& [id, section] : song.sections) {
      const uint16_t scale_mask = section.scale.mask();
      for (const ChordSymbol& chord : section.chord_progression) {
        CHECK((chord.mask() & ~scale_mask) == 0);
      }
    }
  }
}

TEST_CASE("randomized compositions parse their own serialization") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Composition song = randomized_composition(rng);
    const Composition reparsed = parse_composition(serialize_composition(song));
    CHECK(reparsed.sections.size() == song.sections.size());
  }
}

TEST_CASE("prompt-driven scenario demands external compositions") {
  EngineConfig config;
  CHECK_THROWS_AS(run_scenario(ScenarioKind::PromptDriven, 1, 1, config),
                  std::invalid_argument);
}

TEST_CASE("report serializes to json and csv") {
  EngineConfig config;
  config.ga.population_size = 16;
  config.ga.generations = 2;
  const ScenarioReport report = run_scenario(ScenarioKind::Focused, 2, 5, config);
  CHECK(report.to_json().find("scale_consistency_percent") != std::string::npos);
  CHECK(report.to_csv().find("pitch_class_entropy") != std::string::npos);
}

}  // TEST_SUITE
