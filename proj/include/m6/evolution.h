#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "m6/notation.h"
#include "m6/rng.h"

namespace m6 {

struct FeatureTarget {
  double mu = 0.5;      // desired value in [0, 1]
  double sigma = 0.15;  // >= 0.01
  double weight = 0.0;  // >= 0; zero disables the feature
};

struct FitnessSpec {
  std::array<FeatureTarget, kFeatureCount> targets{};
  double harmony_weight = 0.0;

  // At least one positive weight; sigmas floored at 0.01.
  void validate() const;
};

struct GaConfig {
  int population_size = 256;
  int generations = 100;
  int tournament_size = 4;
  double mutation_rate = 0.3;   // per individual per generation
  double crossover_rate = 0.9;
  uint64_t rng_seed = 0;
  int elitism_count = 2;

  // Random initialization: notes drawn from the scale inside [init_low,
  // init_high], with small rest/extension admixture.
  int init_low = 48;
  int init_high = 84;
  double init_rest_prob = 0.1;
  double init_extend_prob = 0.1;

  int threads = 1;  // fitness evaluation workers; results are thread-count independent
};

enum class MutationKind {
  Interval,
  Transpose,
  Extend,
  Rest,
  LongNote,
  ExtensionToNote,
  LengthNormalize,
  Sort,
  RepeatPaste,
  RepeatAdjacent,
};

inline constexpr int kMutationKindCount = 10;
const char* mutation_kind_name(MutationKind kind);

// Site-pinned mutation primitives. apply_mutation samples sites through these;
// tests pin them directly. Each keeps length, alphabet, and the no-leading-
// extension rule intact and is a no-op when the site does not apply.
namespace mutations {

// Replaces sounded note `note_index` with its predecessor's pitch + delta.
void interval(NoteSeq& seq, int note_index, int delta);
// Adds delta to every note code in [begin, end), clamped to 0..127.
void transpose(NoteSeq& seq, int begin, int end, int delta);
// Moves sounded note `note_index` one step earlier, lengthening it and
// shortening (or removing) whatever precedes it.
void extend(NoteSeq& seq, int note_index);
// Turns onset step `step` into a rest.
void note_to_rest(NoteSeq& seq, int step);
// Turns rest step `step` into a note.
void rest_to_note(NoteSeq& seq, int step, int pitch);
// Overwrites [begin, end) with extensions; begin must be >= 1.
void long_note(NoteSeq& seq, int begin, int end);
// Converts the extension at `step` into a note.
void extension_to_note(NoteSeq& seq, int step, int pitch);
// Splits note `note_index` at interior offset `split` (duration > 4) or
// extends it toward a quarter note (duration < 4).
void length_normalize(NoteSeq& seq, int note_index, int split);
// Sorts the sounded pitches inside [begin, end) in place (rests stay put).
void sort_notes(NoteSeq& seq, int begin, int end, bool ascending);
// Copies [src, src+len) over [dst, dst+len), truncated at the sequence end.
void paste(NoteSeq& seq, int src, int dst, int len);

}  // namespace mutations

// Applies one mutation of the given kind at random sites. Kinds that find no
// applicable site return the input unchanged.
NoteSeq apply_mutation(MutationKind kind, const NoteSeq& seq, Rng& rng);

// One-point crossover; children swap suffixes at a uniform cut in [0, len].
std::pair<NoteSeq, NoteSeq> crossover(const NoteSeq& a, const NoteSeq& b, Rng& rng);

// Cross-track interval score: per-step interval classes scored, averaged, and
// squashed with tanh(mean / 10). Result in [-1, 1]; symmetric in a and b.
double harmony_score(const NoteSeq& a, const NoteSeq& b);

// Weighted sum of per-feature Gaussians plus the harmony term. The harmony
// term maps the mean reference score from [-1, 1] to [0, 1] so the total
// stays within [0, sum of weights + harmony_weight].
double fitness(const NoteSeq& seq, const FitnessSpec& spec, const HarmonicContext& ctx,
               const std::vector<NoteSeq>& refs);
double fitness_from_features(const FeatureVector& features, const FitnessSpec& spec);

struct EvolveStats {
  std::vector<double> best_per_generation;  // generations + 1 entries
};

// Runs the full loop: evaluate, tournament-select, crossover, mutate, carry
// elites. Returns the best individual seen. Deterministic for a fixed seed.
NoteSeq evolve(const FitnessSpec& spec, const GaConfig& cfg, const HarmonicContext& ctx,
               const std::vector<NoteSeq>& refs, int measures, int steps_per_measure,
               EvolveStats* stats = nullptr);

// Random individual drawn per the initialization scheme above.
NoteSeq random_individual(const GaConfig& cfg, const Scale& scale, int measures,
                          int steps_per_measure, Rng& rng);

}  // namespace m6
