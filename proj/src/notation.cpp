#include "m6/notation.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <unordered_map>

namespace m6 {

bool NoteSeq::valid() const {
  if (codes.empty() || steps_per_measure <= 0 || measures <= 0) return false;
  if (length() != steps_per_measure * measures) return false;
  if (codes[0] == kExtendCode) return false;
  for (int code : codes) {
    if (code < kExtendCode || code > 127) return false;
  }
  return true;
}

NoteSeq make_note_seq(std::vector<int> codes, int steps_per_measure, int measures) {
  NoteSeq seq{std::move(codes), steps_per_measure, measures};
  assert(seq.valid());
  return seq;
}

std::vector<SoundedNote> sounded_notes(const NoteSeq& seq) {
  std::vector<SoundedNote> notes;
  for (int i = 0; i < seq.length(); ++i) {
    const int code = seq.codes[static_cast<size_t>(i)];
    if (code >= 0) {
      notes.push_back({code, i, 1});
    } else if (code == kExtendCode && !notes.empty() &&
               notes.back().onset + notes.back().duration == i) {
      ++notes.back().duration;
    }
  }
  return notes;
}

bool is_dissonant_interval(int semitones) {
  const int pc = std::abs(semitones) % 12;
  return pc == 1 || pc == 2 || pc == 6 || pc == 10 || pc == 11;
}

const char* feature_name(int feature) {
  static const char* kNames[kFeatureCount] = {
      "unique_notes_per_measure",
      "unique_intervals_per_measure",
      "dissonant_interval_ratio",
      "over_octave_interval_ratio",
      "in_scale_ratio",
      "in_chord_ratio",
      "pitch_range",
      "rest_ratio",
      "unique_lengths_per_measure",
      "avg_pitch",
      "pitch_deviation",
      "strong_beat_length",
      "melodic_contour",
      "offbeat_ratio",
      "avg_interval_size",
      "log_avg_note_length",
      "log_length_deviation",
      "stepwise_interval_runs",
      "short_note_runs",
      "repeated_fragment_length",
      "root_note_measure_starts",
  };
  return feature >= 0 && feature < kFeatureCount ? kNames[feature] : "";
}

// ---------------------------------------------------------------------------
// HarmonicContext
// ---------------------------------------------------------------------------

HarmonicContext HarmonicContext::make(const Scale& scale,
                                      std::vector<ChordSymbol> chord_per_step) {
  HarmonicContext ctx;
  ctx.scale = scale;
  ctx.scale_mask = scale.mask();
  ctx.chord_per_step = std::move(chord_per_step);
  ctx.chord_mask.reserve(ctx.chord_per_step.size());
  ctx.chord_root.reserve(ctx.chord_per_step.size());
  for (const auto& chord : ctx.chord_per_step) {
    ctx.chord_mask.push_back(chord.mask());
    ctx.chord_root.push_back(static_cast<uint8_t>(chord.root));
  }
  return ctx;
}

HarmonicContext HarmonicContext::for_section(const Section& section, int measures) {
  const int spm = section.steps_per_measure();
  std::vector<ChordSymbol> per_step;
  per_step.reserve(static_cast<size_t>(spm) * static_cast<size_t>(measures));
  for (int m = 0; m < measures; ++m) {
    const ChordSymbol& chord = section.chord_at_measure(m);
    for (int s = 0; s < spm; ++s) per_step.push_back(chord);
  }
  return make(section.scale, std::move(per_step));
}

HarmonicContext HarmonicContext::prefix(int steps) const {
  assert(steps <= this->steps());
  return make(scale, std::vector<ChordSymbol>(chord_per_step.begin(),
                                              chord_per_step.begin() + steps));
}

// ---------------------------------------------------------------------------
// Feature extraction
// ---------------------------------------------------------------------------

namespace {

// Longest substring of `codes` occurring at least twice without overlap
// (occurrence starts at least L apart). Binary search over the length with a
// rolling hash; candidate matches are verified directly.
int longest_repeated_fragment(const std::vector<int>& codes) {
  const int n = static_cast<int>(codes.size());
  if (n < 2) return 0;

  auto has_repeat = [&](int len) {
    if (len <= 0) return true;
    constexpr uint64_t kBase = 1099511628211ull;
    uint64_t power = 1;
    for (int i = 0; i < len - 1; ++i) power *= kBase;
    std::unordered_map<uint64_t, int> first_pos;
    first_pos.reserve(static_cast<size_t>(n));
    uint64_t hash = 0;
    for (int i = 0; i < n; ++i) {
      hash = hash * kBase + static_cast<uint64_t>(codes[static_cast<size_t>(i)] + 2);
      if (i >= len) {
        hash -= power * kBase * static_cast<uint64_t>(codes[static_cast<size_t>(i - len)] + 2);
      }
      if (i >= len - 1) {
        const int start = i - len + 1;
        auto [it, inserted] = first_pos.try_emplace(hash, start);
        if (!inserted && start - it->second >= len &&
            std::equal(codes.begin() + it->second, codes.begin() + it->second + len,
                       codes.begin() + start)) {
          return true;
        }
      }
    }
    return false;
  };

  int lo = 1, hi = n / 2, best = 0;
  while (lo <= hi) {
    const int mid = (lo + hi) / 2;
    if (has_repeat(mid)) {
      best = mid;
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  return best;
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace

FeatureVector extract_features(const NoteSeq& seq, const HarmonicContext& ctx) {
  assert(ctx.steps() == seq.length());
  FeatureVector f{};
  f.fill(0.0);

  const int len = seq.length();
  const int spm = seq.steps_per_measure;
  const int measures = seq.measures;
  const std::vector<SoundedNote> notes = sounded_notes(seq);
  const int n = static_cast<int>(notes.size());

  // Adjacent sounded-note intervals in onset order.
  std::vector<int> intervals;
  intervals.reserve(notes.empty() ? 0 : notes.size() - 1);
  for (int k = 0; k + 1 < n; ++k) {
    intervals.push_back(notes[static_cast<size_t>(k + 1)].pitch -
                        notes[static_cast<size_t>(k)].pitch);
  }
  const int m = static_cast<int>(intervals.size());

  // 1/9: per-measure uniqueness of pitches and of durations, averaged over
  // measures that contain at least one onset.
  {
    double note_sum = 0.0, len_sum = 0.0;
    int counted = 0;
    size_t cursor = 0;
    for (int measure = 0; measure < measures; ++measure) {
      const int end_step = (measure + 1) * spm;
      std::vector<int> pitches, durations;
      while (cursor < notes.size() && notes[cursor].onset < end_step) {
        pitches.push_back(notes[cursor].pitch);
        durations.push_back(notes[cursor].duration);
        ++cursor;
      }
      if (pitches.empty()) continue;
      auto unique_ratio = [](std::vector<int> v) {
        const double total = static_cast<double>(v.size());
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return static_cast<double>(v.size()) / total;
      };
      note_sum += unique_ratio(pitches);
      len_sum += unique_ratio(durations);
      ++counted;
    }
    if (counted > 0) {
      f[kUniqueNotesPerMeasure] = note_sum / counted;
      f[kUniqueLengthsPerMeasure] = len_sum / counted;
    }
  }

  // 2: per-measure uniqueness of interval sizes; an interval belongs to the
  // measure of its second note's onset.
  {
    double sum = 0.0;
    int counted = 0;
    size_t cursor = 0;
    for (int measure = 0; measure < measures; ++measure) {
      const int end_step = (measure + 1) * spm;
      std::vector<int> sizes;
      while (cursor < intervals.size() && notes[cursor + 1].onset < end_step) {
        sizes.push_back(std::abs(intervals[cursor]));
        ++cursor;
      }
      if (sizes.empty()) continue;
      const double total = static_cast<double>(sizes.size());
      std::sort(sizes.begin(), sizes.end());
      sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
      sum += static_cast<double>(sizes.size()) / total;
      ++counted;
    }
    if (counted > 0) f[kUniqueIntervalsPerMeasure] = sum / counted;
  }

  // 3/4/13/15/18: interval statistics.
  if (m > 0) {
    int dissonant = 0, over_octave = 0, up = 0, flat = 0;
    double abs_sum = 0.0;
    for (int d : intervals) {
      if (is_dissonant_interval(d)) ++dissonant;
      if (std::abs(d) > 12) ++over_octave;
      if (d > 0) ++up;
      if (d == 0) ++flat;
      abs_sum += std::abs(d);
    }
    f[kDissonantIntervalRatio] = static_cast<double>(dissonant) / m;
    f[kOverOctaveIntervalRatio] = static_cast<double>(over_octave) / m;
    f[kMelodicContour] = (up + 0.5 * flat) / m;
    f[kAvgIntervalSize] = clamp01(abs_sum / m / 12.0);
    if (m > 1) {
      auto stepwise = [](int d) {
        const int a = std::abs(d);
        return a == 1 || a == 2;
      };
      int runs = 0;
      for (int k = 0; k + 1 < m; ++k) {
        if (stepwise(intervals[static_cast<size_t>(k)]) &&
            stepwise(intervals[static_cast<size_t>(k + 1)])) {
          ++runs;
        }
      }
      f[kStepwiseIntervalRuns] = static_cast<double>(runs) / (m - 1);
    }
  }

  // 5/6/10/11/14/19: per-note statistics.
  if (n > 0) {
    int in_scale = 0, in_chord = 0, offbeat = 0;
    double pitch_sum = 0.0;
    int lo = 127, hi = 0;
    for (const auto& note : notes) {
      if (ctx.in_scale(note.pitch)) ++in_scale;
      if (ctx.in_chord(note.pitch, note.onset)) ++in_chord;
      if (note.onset % 2 != 0) ++offbeat;
      pitch_sum += note.pitch;
      lo = std::min(lo, note.pitch);
      hi = std::max(hi, note.pitch);
    }
    const double mean_pitch = pitch_sum / n;
    double var = 0.0;
    for (const auto& note : notes) {
      var += (note.pitch - mean_pitch) * (note.pitch - mean_pitch);
    }
    f[kInScaleRatio] = static_cast<double>(in_scale) / n;
    f[kInChordRatio] = static_cast<double>(in_chord) / n;
    f[kOffbeatRatio] = static_cast<double>(offbeat) / n;
    f[kAvgPitch] = mean_pitch / 127.0;
    f[kPitchDeviation] = clamp01(std::sqrt(var / n) / 12.0);
    f[kPitchRange] = clamp01(static_cast<double>(hi - lo) / 48.0);

    if (n > 1) {
      int short_runs = 0;
      for (int k = 0; k + 1 < n; ++k) {
        if (notes[static_cast<size_t>(k)].duration <= 2 &&
            notes[static_cast<size_t>(k + 1)].duration <= 2) {
          ++short_runs;
        }
      }
      f[kShortNoteRuns] = static_cast<double>(short_runs) / (n - 1);
    }
  }

  // 8: steps not covered by a sounded note.
  {
    int covered = 0;
    for (const auto& note : notes) covered += note.duration;
    f[kRestRatio] = static_cast<double>(len - covered) / len;
  }

  // 12: mean duration of notes starting on a strong step. Strong steps are
  // the measure start plus the half-measure point when that point lands on a
  // quarter-note boundary (beat 3 of 4/4 and the like).
  {
    const bool has_mid = spm >= 16 && (spm / 2) % 4 == 0;
    double dur_sum = 0.0;
    int count = 0;
    for (const auto& note : notes) {
      const int pos = note.onset % spm;
      if (pos == 0 || (has_mid && pos == spm / 2)) {
        dur_sum += note.duration;
        ++count;
      }
    }
    if (count > 0) f[kStrongBeatLength] = clamp01(dur_sum / count / spm);
  }

  // 16/17: natural log of durations mapped from [ln 1, ln spm] to [0, 1].
  if (n > 0 && spm > 1) {
    const double log_span = std::log(static_cast<double>(spm));
    double dur_sum = 0.0;
    for (const auto& note : notes) dur_sum += note.duration;
    f[kLogAvgNoteLength] = clamp01(std::log(dur_sum / n) / log_span);
    double log_mean = 0.0;
    for (const auto& note : notes) log_mean += std::log(static_cast<double>(note.duration));
    log_mean /= n;
    double log_var = 0.0;
    for (const auto& note : notes) {
      const double d = std::log(static_cast<double>(note.duration)) - log_mean;
      log_var += d * d;
    }
    f[kLogLengthDeviation] = clamp01(std::sqrt(log_var / n) / log_span);
  }

  // 20: longest code substring occurring twice without overlap.
  f[kRepeatedFragmentLength] =
      static_cast<double>(longest_repeated_fragment(seq.codes)) / len;

  // 21: measures whose first step is an onset on the current chord root.
  {
    int count = 0;
    for (int measure = 0; measure < measures; ++measure) {
      const int step = measure * spm;
      const int code = seq.codes[static_cast<size_t>(step)];
      if (code >= 0 && code % 12 == ctx.chord_root[static_cast<size_t>(step)]) ++count;
    }
    f[kRootNoteMeasureStarts] = static_cast<double>(count) / measures;
  }

  return f;
}

}  // namespace m6
