#include "m6/percussion.h"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace m6 {

// ---------------------------------------------------------------------------
// Beat table defaults
//
// Hand-tuned kick/snare probabilities per meter. Quarter meters lean on the
// classic backbeat; eighth meters follow their usual groupings (5/8 as 3+2,
// 7/8 as 2+2+3, 9/8 as 3+3+3).
// ---------------------------------------------------------------------------

BeatTable BeatTable::defaults() {
  BeatTable t;
  t.set(2, 4, {{0.95, 0.2}, {0.05, 0.9}});
  t.set(3, 4, {{0.95, 0.15, 0.25}, {0.05, 0.25, 0.7}});
  t.set(4, 4, {{0.95, 0.1, 0.8, 0.15}, {0.05, 0.95, 0.05, 0.95}});
  t.set(5, 4, {{0.95, 0.1, 0.7, 0.15, 0.3}, {0.05, 0.8, 0.1, 0.85, 0.2}});
  t.set(6, 4, {{0.95, 0.1, 0.3, 0.8, 0.1, 0.3}, {0.05, 0.2, 0.85, 0.05, 0.2, 0.85}});
  t.set(7, 4, {{0.95, 0.1, 0.7, 0.1, 0.75, 0.1, 0.25}, {0.05, 0.85, 0.1, 0.85, 0.05, 0.85, 0.3}});
  t.set(8, 4, {{0.95, 0.1, 0.8, 0.15, 0.9, 0.1, 0.8, 0.15},
               {0.05, 0.95, 0.05, 0.95, 0.05, 0.95, 0.05, 0.95}});
  t.set(9, 4, {{0.95, 0.1, 0.6, 0.1, 0.75, 0.1, 0.6, 0.1, 0.3},
               {0.05, 0.8, 0.1, 0.8, 0.05, 0.8, 0.1, 0.8, 0.25}});
  t.set(2, 8, {{0.9, 0.1}, {0.05, 0.5}});
  t.set(3, 8, {{0.9, 0.05, 0.15}, {0.05, 0.1, 0.5}});
  t.set(4, 8, {{0.9, 0.1, 0.5, 0.15}, {0.05, 0.8, 0.1, 0.7}});
  t.set(5, 8, {{0.9, 0.05, 0.15, 0.7, 0.1}, {0.05, 0.1, 0.6, 0.05, 0.5}});
  t.set(6, 8, {{0.95, 0.05, 0.1, 0.25, 0.05, 0.15}, {0.05, 0.05, 0.15, 0.9, 0.05, 0.2}});
  t.set(7, 8, {{0.9, 0.05, 0.6, 0.05, 0.7, 0.05, 0.2}, {0.05, 0.5, 0.05, 0.6, 0.05, 0.75, 0.2}});
  t.set(8, 8, {{0.9, 0.05, 0.3, 0.1, 0.7, 0.05, 0.3, 0.1},
               {0.05, 0.3, 0.7, 0.1, 0.05, 0.3, 0.75, 0.15}});
  t.set(9, 8, {{0.9, 0.05, 0.1, 0.65, 0.05, 0.1, 0.6, 0.05, 0.15},
               {0.05, 0.1, 0.3, 0.05, 0.8, 0.1, 0.05, 0.4, 0.3}});
  return t;
}

const BeatRow& BeatTable::row(int beats, int unit) const {
  auto it = rows_.find({beats, unit});
  if (it == rows_.end()) throw std::out_of_range("no beat row for this meter");
  return it->second;
}

bool BeatTable::has(int beats, int unit) const { return rows_.contains({beats, unit}); }

void BeatTable::set(int beats, int unit, BeatRow row) {
  assert(static_cast<int>(row.kick.size()) == beats &&
         static_cast<int>(row.snare.size()) == beats);
  rows_[{beats, unit}] = std::move(row);
}

// ---------------------------------------------------------------------------
// Signature decomposition and grid padding
// ---------------------------------------------------------------------------

namespace {

void split_numerator(int n, std::vector<int>& parts) {
  if (n <= 9) {
    parts.push_back(n);
    return;
  }
  split_numerator((n + 1) / 2, parts);
  split_numerator(n / 2, parts);
}

}  // namespace

std::vector<std::pair<int, int>> decompose_signature(const TimeSignature& ts) {
  if (ts.numerator < 2) {
    throw std::invalid_argument("cannot decompose a numerator below 2");
  }
  std::vector<int> parts;
  split_numerator(ts.numerator, parts);
  std::sort(parts.begin(), parts.end(), std::greater<>());
  std::vector<std::pair<int, int>> out;
  out.reserve(parts.size());
  for (int p : parts) out.emplace_back(p, ts.denominator);
  return out;
}

int pad_interval(int unit) { return 16 / unit - 1; }

// ---------------------------------------------------------------------------
// Fill chain
// ---------------------------------------------------------------------------

namespace {

double tom_center(int state) {
  if (state == 0) return 2.0;
  double sum = 0.0;
  int count = 0;
  for (int t = 0; t < 5; ++t) {
    if ((state >> t) & 1) {
      sum += t;
      ++count;
    }
  }
  return sum / count;
}

}  // namespace

FillChain FillChain::defaults() {
  // Sparse states are preferred and mass concentrates on transitions that
  // move the active toms downward, so fills tend to tumble from high to low.
  FillChain chain;
  for (int s = 0; s < 32; ++s) {
    double row_sum = 0.0;
    for (int t = 0; t < 32; ++t) {
      const int active = std::popcount(static_cast<unsigned>(t));
      double w = active == 1 ? 3.0 : active == 2 ? 1.5 : active == 0 ? 0.4 : 0.25;
      const double target = tom_center(s) - 0.7;
      w *= std::exp(-std::abs(tom_center(t) - target));
      chain.transition[static_cast<size_t>(s)][static_cast<size_t>(t)] = w;
      row_sum += w;
    }
    for (int t = 0; t < 32; ++t) {
      chain.transition[static_cast<size_t>(s)][static_cast<size_t>(t)] /= row_sum;
    }
  }
  return chain;
}

void FillChain::validate() const {
  for (const auto& row : transition) {
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0) throw std::invalid_argument("negative transition probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("transition row does not sum to 1");
    }
  }
}

int FillChain::step(int state, Rng& rng) const {
  const double roll = rng.uniform_double();
  double cumulative = 0.0;
  const auto& row = transition[static_cast<size_t>(state & 31)];
  for (int t = 0; t < 32; ++t) {
    cumulative += row[static_cast<size_t>(t)];
    if (roll < cumulative) return t;
  }
  return 31;
}

DrumGrid generate_fill(int length_steps, const FillChain& chain, Rng& rng, int start_state) {
  assert(length_steps >= 1);
  DrumGrid frag;
  frag.states.assign(static_cast<size_t>(length_steps), 0);
  frag.steps_per_measure = length_steps;
  frag.measures = 1;
  int state = start_state >= 0 ? (start_state & 31) : rng.uniform_int(1, 31);
  for (int i = 0; i < length_steps; ++i) {
    uint16_t bits = 0;
    for (int t = 0; t < 5; ++t) {
      if ((state >> t) & 1) bits |= component_bit(kTomLowest + t);
    }
    if (state & 1) bits |= component_bit(kSnareDrum);  // snare doubles the lowest tom
    frag.states[static_cast<size_t>(i)] = bits;
    state = chain.step(state, rng);
  }
  return frag;
}

// ---------------------------------------------------------------------------
// Measure generation
// ---------------------------------------------------------------------------

DrumGrid generate_measure(const TimeSignature& ts, Emotion emotion, DrumMode mode, Rng& rng,
                          const BeatTable& table, const FillChain& chain,
                          const DrumParams& params, bool final_measure) {
  const int spm = ts.steps_per_measure();
  DrumGrid grid;
  grid.states.assign(static_cast<size_t>(spm), 0);
  grid.steps_per_measure = spm;
  grid.measures = 1;

  const int stride = pad_interval(ts.denominator) + 1;  // states per beat

  // Kick and snare from the probability table, padded onto the grid.
  auto place_beats = [&](const BeatRow& beat_row, int first_beat, int beats) {
    for (int b = 0; b < beats; ++b) {
      const size_t step = static_cast<size_t>((first_beat + b) * stride);
      if (rng.bernoulli(beat_row.kick[static_cast<size_t>(b)])) {
        grid.states[step] |= component_bit(kKickDrum);
      }
      if (rng.bernoulli(beat_row.snare[static_cast<size_t>(b)])) {
        grid.states[step] |= component_bit(kSnareDrum);
      }
    }
  };
  // Patterns exist for quarter and eighth divisions; shorter note values use
  // the eighth patterns, longer ones the quarter patterns.
  const int table_unit = ts.denominator >= 8 ? 8 : 4;
  if (ts.numerator == 1) {
    // Below the table range: a single downbeat.
    const BeatRow& beat_row = table.row(2, table_unit);
    place_beats(beat_row, 0, 1);
  } else {
    int beat_cursor = 0;
    for (const auto& [beats, unit] : decompose_signature(ts)) {
      (void)unit;
      place_beats(table.row(beats, table_unit), beat_cursor, beats);
      beat_cursor += beats;
    }
  }

  if (mode != DrumMode::DrumSolo) {
    // Hi-hats at a subdivision chosen by arousal.
    const int hat_stride = emotion.arousal < params.hat_quarter_below  ? 4
                           : emotion.arousal < params.hat_eighth_below ? 2
                                                                       : 1;
    int last_hat = -1;
    for (int step = 0; step < spm; step += hat_stride) {
      grid.states[static_cast<size_t>(step)] |= component_bit(kClosedHat);
      last_hat = step;
    }
    if (last_hat >= 0 && rng.bernoulli(params.open_hat_scale * emotion.arousal)) {
      grid.states[static_cast<size_t>(last_hat)] &= ~component_bit(kClosedHat);
      grid.states[static_cast<size_t>(last_hat)] |= component_bit(kOpenHat);
    }

    // Ride and bell ride the quarters offset by an eighth.
    if (rng.bernoulli(params.ride_base_prob + params.ride_arousal_scale * emotion.arousal)) {
      for (int step = 2; step < spm; step += 4) {
        grid.states[static_cast<size_t>(step)] |= component_bit(kRideCymbal);
      }
    }
    if (rng.bernoulli(params.bell_prob)) {
      for (int step = 2; step < spm; step += 4) {
        grid.states[static_cast<size_t>(step)] |= component_bit(kRideBell);
      }
    }
  }

  // Crash mostly on the downbeat, rarely elsewhere.
  if (rng.bernoulli(params.crash_start_prob)) {
    grid.states[0] |= component_bit(kCrashCymbal);
  }
  for (int step = 4; step < spm; step += 4) {
    if (rng.bernoulli(params.crash_elsewhere_prob)) {
      grid.states[static_cast<size_t>(step)] |= component_bit(kCrashCymbal);
    }
  }

  if (mode == DrumMode::DrumSolo) {
    // Fill material everywhere; only kick and crash survive from the beat.
    const uint16_t keep = component_bit(kKickDrum) | component_bit(kCrashCymbal);
    for (auto& state : grid.states) state &= keep;
    const DrumGrid fill = generate_fill(spm, chain, rng);
    for (int i = 0; i < spm; ++i) {
      grid.states[static_cast<size_t>(i)] |= fill.states[static_cast<size_t>(i)];
    }
  } else if (mode == DrumMode::Standard) {
    double fill_prob = params.fill_base_prob + params.fill_arousal_scale * emotion.arousal;
    if (final_measure) fill_prob *= 2.0;
    if (rng.bernoulli(std::min(fill_prob, 1.0))) {
      const int len =
          rng.uniform_int(std::min(params.fill_min_steps, spm), std::min(params.fill_max_steps, spm));
      const DrumGrid fill = generate_fill(len, chain, rng);
      for (int i = 0; i < len; ++i) {
        grid.states[static_cast<size_t>(spm - len + i)] |= fill.states[static_cast<size_t>(i)];
      }
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Post-processing
// ---------------------------------------------------------------------------

void post_process(DrumGrid& grid, Rng& rng, const DrumParams& params) {
  // Kick/snare echo into the following step, from a snapshot so echoes do not
  // cascade.
  const std::vector<uint16_t> snapshot = grid.states;
  for (size_t i = 0; i + 1 < snapshot.size(); ++i) {
    for (int component : {kKickDrum, kSnareDrum}) {
      if ((snapshot[i] & component_bit(component)) && rng.bernoulli(params.echo_prob)) {
        grid.states[i + 1] |= component_bit(component);
      }
    }
  }

  // No more than two limbs' worth of hand hits per state.
  for (auto& state : grid.states) {
    while (std::popcount(static_cast<unsigned>(state & kHandBitsMask)) > 2) {
      std::vector<int> set_bits;
      for (int bit = 0; bit < 12; ++bit) {
        if ((state & kHandBitsMask) & (1u << bit)) set_bits.push_back(bit);
      }
      const int victim = set_bits[static_cast<size_t>(rng.pick_index(
          static_cast<int>(set_bits.size())))];
      state = static_cast<uint16_t>(state & ~(1u << victim));
    }
  }

  // Sparsity thinning over toms, crash, ride, bell.
  for (auto& state : grid.states) {
    for (int component = kTomLowest; component <= kRideBell; ++component) {
      if ((state & component_bit(component)) && rng.bernoulli(params.sparsity_prob)) {
        state = static_cast<uint16_t>(state & ~component_bit(component));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Kit mapping
// ---------------------------------------------------------------------------

namespace {

// GM percussion note per component, indexed by component - 1.
constexpr std::array<int, 12> kStandardKit = {42, 46, 36, 38, 41, 43, 45, 47, 48, 49, 51, 53};
constexpr std::array<int, 12> kEthnicKit = {69, 70, 64, 63, 66, 65, 61, 60, 76, 49, 75, 67};
constexpr std::array<int, 12> kOrchestralKit = {44, 54, 35, 38, 41, 43, 45, 47, 48, 57, 51, 81};

const std::array<int, 12>& kit_table(DrumKit kit) {
  switch (kit) {
    case DrumKit::Standard: return kStandardKit;
    case DrumKit::Ethnic: return kEthnicKit;
    case DrumKit::Orchestral: return kOrchestralKit;
  }
  return kStandardKit;
}

}  // namespace

int kit_note(DrumKit kit, int component) {
  return kit_table(kit)[static_cast<size_t>(component - 1)];
}

std::vector<std::pair<int, int>> map_to_kit(const DrumGrid& grid, DrumKit kit) {
  const auto& notes = kit_table(kit);
  std::vector<std::pair<int, int>> events;
  for (int step = 0; step < grid.length(); ++step) {
    const uint16_t state = grid.states[static_cast<size_t>(step)];
    for (int component = 1; component <= 12; ++component) {
      if (state & component_bit(component)) {
        events.emplace_back(notes[static_cast<size_t>(component - 1)], step);
      }
    }
  }
  return events;
}

// ---------------------------------------------------------------------------
// Track generation
// ---------------------------------------------------------------------------

DrumGrid generate_drum_track(const Section& section, int measures, Emotion emotion,
                             DrumMode mode, Rng& rng, const BeatTable& table,
                             const FillChain& chain, const DrumParams& params) {
  const int spm = section.steps_per_measure();
  DrumGrid track;
  track.states.reserve(static_cast<size_t>(spm) * static_cast<size_t>(measures));
  track.steps_per_measure = spm;
  track.measures = measures;
  for (int m = 0; m < measures; ++m) {
    const DrumGrid measure = generate_measure(section.time_signature, emotion, mode, rng, table,
                                              chain, params, m == measures - 1);
    track.states.insert(track.states.end(), measure.states.begin(), measure.states.end());
  }
  post_process(track, rng, params);
  return track;
}

}  // namespace m6
