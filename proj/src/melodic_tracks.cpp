#include "m6/melodic_tracks.h"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace m6 {

TrackFamily family_of(MelodicMode mode) {
  switch (mode) {
    case MelodicMode::Melody: return TrackFamily::Melody;
    case MelodicMode::Solo: return TrackFamily::Solo;
    case MelodicMode::ShortRiff:
    case MelodicMode::LongRiff:
    case MelodicMode::Bassline:
    case MelodicMode::RepetitiveBassline: return TrackFamily::Bass;
    default: return TrackFamily::Motif;
  }
}

RegisterBand register_band(TrackFamily family) {
  switch (family) {
    case TrackFamily::Melody: return {48, 95};   // C3..B6
    case TrackFamily::Solo: return {48, 107};    // C3..B7
    case TrackFamily::Bass: return {24, 59};     // C1..B3
    case TrackFamily::Motif: return {72, 107};   // C5..B7
  }
  return {48, 95};
}

const std::vector<TargetRow>& target_table() {
  using L = TargetLevel;
  using E = EmotionImpact;
  static const std::vector<TargetRow> kTable = {
      // feature                      melody     solo       bass       motif      EI       V   A
      {kUniqueNotesPerMeasure,        L::Low,    L::High,   L::Med,    L::High,   E::None, 0,  0},
      {kUniqueIntervalsPerMeasure,    L::Med,    L::High,   L::High,   L::High,   E::Low,  1,  1},
      {kDissonantIntervalRatio,       L::Low,    L::Low,    L::Low,    L::Low,    E::Med, -1,  0},
      {kOverOctaveIntervalRatio,      L::Zero,   L::Zero,   L::Zero,   L::Zero,   E::None, 0,  0},
      {kInScaleRatio,                 L::High,   L::High,   L::High,   L::High,   E::Low,  0, -1},
      {kInChordRatio,                 L::Med,    L::Med,    L::High,   L::High,   E::Low, -1, -1},
      {kPitchRange,                   L::Low,    L::High,   L::Med,    L::Med,    E::Med,  0,  1},
      {kRestRatio,                    L::Low,    L::Low,    L::Unused, L::Unused, E::Med, -1, -1},
      {kUniqueLengthsPerMeasure,      L::Low,    L::Med,    L::Unused, L::Unused, E::None, 0,  0},
      {kAvgPitch,                     L::Med,    L::Med,    L::Low,    L::Med,    E::Med,  1,  1},
      {kPitchDeviation,               L::Med,    L::Med,    L::Med,    L::Unused, E::Med,  0,  1},
      {kStrongBeatLength,             L::High,   L::High,   L::High,   L::Unused, E::Med,  0, -1},
      {kMelodicContour,               L::Med,    L::Med,    L::Med,    L::Med,    E::High, 1,  0},
      {kOffbeatRatio,                 L::Low,    L::Low,    L::Low,    L::Unused, E::None, 0,  0},
      {kAvgIntervalSize,              L::Med,    L::Med,    L::Med,    L::Unused, E::Med,  1,  0},
      {kLogAvgNoteLength,             L::Med,    L::Med,    L::Med,    L::Unused, E::Med,  0, -1},
      {kLogLengthDeviation,           L::Med,    L::Low,    L::Low,    L::Unused, E::Med, -1,  1},
      {kStepwiseIntervalRuns,         L::High,   L::High,   L::Unused, L::Med,    E::None, 0,  0},
      {kShortNoteRuns,                L::Med,    L::High,   L::Unused, L::Unused, E::Med,  0,  1},
      {kRepeatedFragmentLength,       L::Med,    L::Med,    L::Med,    L::Unused, E::Low,  0,  1},
      {kRootNoteMeasureStarts,        L::Unused, L::Unused, L::Med,    L::Med,    E::Low,  0, -1},
  };
  return kTable;
}

namespace {

bool is_compliance_feature(int feature) {
  return feature == kInScaleRatio || feature == kInChordRatio;
}

double level_value(int feature, TargetLevel level, const LevelParams& p) {
  const bool compliance = is_compliance_feature(feature);
  switch (level) {
    case TargetLevel::Zero: return p.level_zero;
    case TargetLevel::Low: return compliance ? p.compliance_low : p.level_low;
    case TargetLevel::Med: return compliance ? p.compliance_med : p.level_med;
    case TargetLevel::High: return compliance ? p.compliance_high : p.level_high;
    case TargetLevel::Unused: return 0.0;
  }
  return 0.0;
}

double impact_value(EmotionImpact impact, const LevelParams& p) {
  switch (impact) {
    case EmotionImpact::None: return p.ei_none;
    case EmotionImpact::Low: return p.ei_low;
    case EmotionImpact::Med: return p.ei_med;
    case EmotionImpact::High: return p.ei_high;
  }
  return 0.0;
}

TargetLevel level_for_family(const TargetRow& row, TrackFamily family) {
  switch (family) {
    case TrackFamily::Melody: return row.melody;
    case TrackFamily::Solo: return row.solo;
    case TrackFamily::Bass: return row.bass;
    case TrackFamily::Motif: return row.motif;
  }
  return TargetLevel::Unused;
}

}  // namespace

FitnessSpec build_fitness_spec(MelodicMode mode, double valence, double arousal,
                               const LevelParams& levels) {
  const TrackFamily family = family_of(mode);
  FitnessSpec spec;
  spec.harmony_weight = levels.harmony_weight;
  for (const TargetRow& row : target_table()) {
    auto& target = spec.targets[static_cast<size_t>(row.feature)];
    const TargetLevel level = level_for_family(row, family);
    if (level == TargetLevel::Unused) {
      target.weight = 0.0;
      continue;
    }
    const double base = level_value(row.feature, level, levels);
    const double shift = impact_value(row.impact, levels) *
                         (row.valence_dir * valence + row.arousal_dir * (2.0 * arousal - 1.0));
    target.mu = std::clamp(base + shift, 0.0, 1.0);
    target.sigma =
        is_compliance_feature(row.feature) ? levels.compliance_sigma : levels.sigma_default;
    target.weight = levels.weight_default;
  }
  for (int i = 0; i < kFeatureCount; ++i) {
    const auto& override_entry = levels.overrides[static_cast<size_t>(i)];
    auto& target = spec.targets[static_cast<size_t>(i)];
    if (override_entry.mu >= 0.0) target.mu = std::min(override_entry.mu, 1.0);
    if (override_entry.sigma >= 0.0) target.sigma = std::max(override_entry.sigma, 0.01);
    if (override_entry.weight >= 0.0) target.weight = override_entry.weight;
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Structural helpers
// ---------------------------------------------------------------------------

void fold_into_band(NoteSeq& seq, int low, int high) {
  for (int& code : seq.codes) {
    if (code < 0) continue;
    while (code < low) code += 12;
    while (code > high) code -= 12;
    if (code < low) code = low;  // band narrower than an octave
  }
}

namespace {

// Signed pitch-class distance in [-5, 6].
int root_motion(int from_pc, int to_pc) {
  int d = ((to_pc - from_pc) % 12 + 12) % 12;
  if (d > 6) d -= 12;
  return d;
}

int lowest_pitch(const NoteSeq& seq) {
  int lowest = 128;
  for (int code : seq.codes) {
    if (code >= 0) lowest = std::min(lowest, code);
  }
  return lowest;
}

// Copies `unit` across the whole section, shifting each block by the motion
// from the first block's chord root to the block's own. The unit is folded
// away from the band edges first so every shifted copy stays inside.
NoteSeq tile_with_root_motion(NoteSeq unit, int unit_measures, const Section& section,
                              int measures, RegisterBand band) {
  const int spm = section.steps_per_measure();
  const int root0 = section.chord_at_measure(0).root;

  // Align the unit's lowest sounded note with the opening chord root.
  const int low = lowest_pitch(unit);
  if (low <= 127) {
    const int align = root_motion(low % 12, root0);
    mutations::transpose(unit, 0, unit.length(), align);
  }
  fold_into_band(unit, band.low + 6, band.high - 6);

  NoteSeq out;
  out.steps_per_measure = spm;
  out.measures = measures;
  out.codes.assign(static_cast<size_t>(spm) * static_cast<size_t>(measures), kRestCode);
  for (int block_start = 0; block_start < measures; block_start += unit_measures) {
    const int delta = root_motion(root0, section.chord_at_measure(block_start).root);
    NoteSeq copy = unit;
    mutations::transpose(copy, 0, copy.length(), delta);
    const int take = std::min(copy.length(), (measures - block_start) * spm);
    std::copy(copy.codes.begin(), copy.codes.begin() + take,
              out.codes.begin() + static_cast<size_t>(block_start) * static_cast<size_t>(spm));
  }
  assert(out.valid());
  return out;
}

// Repeats a short unit within each measure, restarting at measure boundaries
// and trimming the last copy.
NoteSeq tile_within_measures(const NoteSeq& unit, int spm, int measures) {
  NoteSeq out;
  out.steps_per_measure = spm;
  out.measures = measures;
  out.codes.assign(static_cast<size_t>(spm) * static_cast<size_t>(measures), kRestCode);
  for (int m = 0; m < measures; ++m) {
    for (int offset = 0; offset < spm; offset += unit.length()) {
      const int take = std::min(unit.length(), spm - offset);
      std::copy(unit.codes.begin(), unit.codes.begin() + take,
                out.codes.begin() + static_cast<size_t>(m * spm + offset));
    }
  }
  assert(out.valid());
  return out;
}

void silence_range_per_measure(NoteSeq& seq, int from, int to) {
  for (int m = 0; m < seq.measures; ++m) {
    for (int i = from; i < to; ++i) {
      seq.codes[static_cast<size_t>(m * seq.steps_per_measure + i)] = kRestCode;
    }
  }
}

// Next scale member above (dir > 0) or below (dir < 0) `pitch`.
int scale_step(const Scale& scale, int pitch, int dir) {
  for (int p = pitch + dir; p >= 0 && p <= 127; p += dir) {
    if (scale.contains_pitch(p)) return p;
  }
  return pitch;
}

NoteSeq sustained_roots_measure(const Section& section, int measure, Emotion emotion, Rng& rng) {
  const int spm = section.steps_per_measure();
  NoteSeq bar;
  bar.steps_per_measure = spm;
  bar.measures = 1;
  bar.codes.assign(static_cast<size_t>(spm), kExtendCode);
  const int root = 36 + section.chord_at_measure(measure).root;  // octave 2
  bar.codes[0] = root;

  // Approach the next measure's root through the scale on the last beat(s).
  const double transition_prob = std::min(0.3 + 0.5 * emotion.arousal, 0.9);
  if (spm >= 8 && rng.bernoulli(transition_prob)) {
    const int next_root = 36 + section.chord_at_measure(measure + 1).root;
    const int dir = next_root > root ? 1 : -1;
    const int approach = next_root == root ? scale_step(section.scale, next_root, -1)
                                           : scale_step(section.scale, next_root, -dir);
    if (rng.bernoulli(0.5)) {
      const int earlier = scale_step(section.scale, approach, -dir);
      bar.codes[static_cast<size_t>(spm - 4)] = std::clamp(earlier, 0, 127);
      bar.codes[static_cast<size_t>(spm - 3)] = kExtendCode;
    }
    bar.codes[static_cast<size_t>(spm - 2)] = std::clamp(approach, 0, 127);
    bar.codes[static_cast<size_t>(spm - 1)] = kExtendCode;
  }
  return bar;
}

// Mutations insert chromatic material; a bassline is rule-built rather than
// fitness-policed, so pull every pitch back to the nearest scale member.
void snap_to_scale(NoteSeq& seq, const Scale& scale) {
  for (int& code : seq.codes) {
    if (code < 0 || scale.contains_pitch(code)) continue;
    for (int d = 1; d < 12; ++d) {
      if (code - d >= 0 && scale.contains_pitch(code - d)) {
        code -= d;
        break;
      }
      if (code + d <= 127 && scale.contains_pitch(code + d)) {
        code += d;
        break;
      }
    }
  }
}

NoteSeq generate_bassline(const Section& section, int measures, Emotion emotion, Rng& rng,
                          bool repetitive, RegisterBand band) {
  const int spm = section.steps_per_measure();
  const int mutation_count = static_cast<int>(std::lround(emotion.arousal * 4.0));

  if (repetitive) {
    // One bar, mutated once, then shifted to follow the progression.
    NoteSeq bar = sustained_roots_measure(section, 0, emotion, rng);
    for (int k = 0; k < mutation_count; ++k) {
      const auto kind = static_cast<MutationKind>(rng.uniform_int(0, kMutationKindCount - 1));
      bar = apply_mutation(kind, bar, rng);
    }
    snap_to_scale(bar, section.scale);
    return tile_with_root_motion(std::move(bar), 1, section, measures, band);
  }

  NoteSeq seq;
  seq.steps_per_measure = spm;
  seq.measures = measures;
  seq.codes.reserve(static_cast<size_t>(spm) * static_cast<size_t>(measures));
  for (int m = 0; m < measures; ++m) {
    const NoteSeq bar = sustained_roots_measure(section, m, emotion, rng);
    seq.codes.insert(seq.codes.end(), bar.codes.begin(), bar.codes.end());
  }
  for (int k = 0; k < mutation_count; ++k) {
    const auto kind = static_cast<MutationKind>(rng.uniform_int(0, kMutationKindCount - 1));
    seq = apply_mutation(kind, seq, rng);
  }
  snap_to_scale(seq, section.scale);
  fold_into_band(seq, band.low, band.high);
  assert(seq.valid());
  return seq;
}

std::vector<NoteSeq> slice_refs(const std::vector<NoteSeq>& refs, int steps,
                                int steps_per_measure, int measures) {
  std::vector<NoteSeq> out;
  for (const auto& ref : refs) {
    if (ref.length() < steps) continue;
    NoteSeq sliced;
    sliced.codes.assign(ref.codes.begin(), ref.codes.begin() + steps);
    sliced.steps_per_measure = steps_per_measure;
    sliced.measures = measures;
    if (sliced.codes[0] == kExtendCode) sliced.codes[0] = kRestCode;
    out.push_back(std::move(sliced));
  }
  return out;
}

}  // namespace

NoteSeq generate_track(MelodicMode mode, const Section& section, Emotion emotion,
                       const HarmonicContext& ctx, const std::vector<NoteSeq>& refs,
                       const GaConfig& cfg, const LevelParams& levels, EvolveStats* stats) {
  const int spm = section.steps_per_measure();
  const int measures = section.measures;
  assert(ctx.steps() == spm * measures);

  const TrackFamily family = family_of(mode);
  const RegisterBand band = register_band(family);
  const FitnessSpec spec = build_fitness_spec(mode, emotion.valence, emotion.arousal, levels);

  GaConfig ga = cfg;
  ga.init_low = band.low;
  ga.init_high = band.high;

  // Evolves a unit of `unit_steps` against the opening harmony.
  auto evolve_unit = [&](int unit_steps, int unit_measures) {
    const HarmonicContext unit_ctx =
        ctx.prefix(unit_steps);
    const int unit_spm = unit_steps / unit_measures;
    return evolve(spec, ga, unit_ctx, slice_refs(refs, unit_steps, unit_spm, unit_measures),
                  unit_measures, unit_spm, stats);
  };

  switch (mode) {
    case MelodicMode::Melody:
    case MelodicMode::Solo: {
      NoteSeq seq = evolve(spec, ga, ctx, refs, measures, spm, stats);
      fold_into_band(seq, band.low, band.high);
      return seq;
    }
    case MelodicMode::ShortRiff: {
      NoteSeq unit = evolve_unit(spm, 1);
      return tile_with_root_motion(std::move(unit), 1, section, measures, band);
    }
    case MelodicMode::LongRiff: {
      const int unit_measures = std::min(2, measures);
      NoteSeq unit = evolve_unit(spm * unit_measures, unit_measures);
      return tile_with_root_motion(std::move(unit), unit_measures, section, measures, band);
    }
    case MelodicMode::Bassline:
    case MelodicMode::RepetitiveBassline: {
      Rng rng(ga.rng_seed);
      return generate_bassline(section, measures, emotion, rng,
                               mode == MelodicMode::RepetitiveBassline, band);
    }
    case MelodicMode::LongMotif: {
      NoteSeq unit = evolve_unit(spm, 1);
      return tile_with_root_motion(std::move(unit), 1, section, measures, band);
    }
    case MelodicMode::OpeningMotif:
    case MelodicMode::ClosingMotif: {
      NoteSeq unit = evolve_unit(spm, 1);
      fold_into_band(unit, band.low, band.high);
      NoteSeq seq = tile_within_measures(unit, spm, measures);
      const int half = (spm + 1) / 2;
      if (mode == MelodicMode::OpeningMotif) {
        silence_range_per_measure(seq, half, spm);
      } else {
        silence_range_per_measure(seq, 0, spm - half);
      }
      return seq;
    }
    case MelodicMode::RepeatedMotif: {
      const int unit_steps = (spm + 1) / 2;
      NoteSeq unit = evolve_unit(unit_steps, 1);
      fold_into_band(unit, band.low, band.high);
      return tile_within_measures(unit, spm, measures);
    }
    case MelodicMode::ShortRepeatedMotif: {
      const int unit_steps = std::min(4, spm);
      NoteSeq unit = evolve_unit(unit_steps, 1);
      fold_into_band(unit, band.low, band.high);
      return tile_within_measures(unit, spm, measures);
    }
  }
  return evolve(spec, ga, ctx, refs, measures, spm, stats);
}

}  // namespace m6
