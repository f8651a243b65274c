#include "m6/harmony_tracks.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace m6 {

double Voicing::center_of_gravity() const {
  if (pitches.empty()) return 0.0;
  return std::accumulate(pitches.begin(), pitches.end(), 0.0) /
         static_cast<double>(pitches.size());
}

std::vector<int> size_voicing(const ChordSymbol& chord, double arousal) {
  std::vector<int> degrees = chord.intervals();
  const int fifth = chord.fifth_interval();

  if (arousal < 0.3 || degrees.size() > 4) {
    auto it = std::find(degrees.begin(), degrees.end(), fifth);
    if (it != degrees.end()) degrees.erase(it);
  }
  if (arousal > 0.7 && degrees.size() < 5) {
    degrees.push_back(12);
  }
  if (arousal > 0.9 && degrees.size() < 6) {
    degrees.push_back(12 + fifth);
  }
  assert(degrees.size() >= 2 && degrees.size() <= 6);
  return degrees;
}

// ---------------------------------------------------------------------------
// Octave placement
// ---------------------------------------------------------------------------

namespace {

constexpr double kCenterLow = 45.0;   // A2 at valence -1
constexpr double kCenterHigh = 69.0;  // A4 at valence +1

struct Candidate {
  // |pitch sum - n * target|: same ordering as the center-of-gravity
  // distance, but integer sums keep mathematical ties (sums symmetric around
  // the target) inside one epsilon instead of one ulp apart.
  double distance = std::numeric_limits<double>::infinity();
  long sum = 0;   // tie: toward the lower voicing
  int span = 0;   // tie: toward the compact voicing
  std::vector<int> pitches;

  bool better_than(const Candidate& other) const {
    if (std::abs(distance - other.distance) > 1e-6) return distance < other.distance;
    if (sum != other.sum) return sum < other.sum;
    if (span != other.span) return span < other.span;
    return pitches < other.pitches;
  }
};

}  // namespace

Voicing place_voicing(int root_pc, const std::vector<int>& degrees, double valence) {
  const double target = kCenterLow + (valence + 1.0) / 2.0 * (kCenterHigh - kCenterLow);
  const size_t n = degrees.size();
  assert(n >= 1 && n <= 6);

  // Per-note candidate pitches: the octave closest to the target, +-2.
  std::vector<std::vector<int>> options(n);
  for (size_t i = 0; i < n; ++i) {
    const int pc = (root_pc + degrees[i]) % 12;
    const int base = static_cast<int>(std::lround((target - pc) / 12.0));
    for (int shift = -2; shift <= 2; ++shift) {
      const int pitch = pc + 12 * (base + shift);
      if (pitch >= 0 && pitch <= 127) options[i].push_back(pitch);
    }
  }

  Candidate best;
  std::vector<int> chosen(n, 0);
  std::vector<int> sorted;
  auto search = [&](auto&& self, size_t index) -> void {
    if (index == n) {
      sorted.assign(chosen.begin(), chosen.end());
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return;
      const long sum = std::accumulate(sorted.begin(), sorted.end(), 0L);
      Candidate candidate{std::abs(sum - static_cast<double>(n) * target), sum,
                          sorted.back() - sorted.front(), sorted};
      if (candidate.better_than(best)) best = std::move(candidate);
      return;
    }
    for (int pitch : options[index]) {
      chosen[index] = pitch;
      self(self, index + 1);
    }
  };
  search(search, 0);

  assert(!best.pitches.empty());
  return Voicing{std::move(best.pitches)};
}

// ---------------------------------------------------------------------------
// Playback modes
// ---------------------------------------------------------------------------

namespace {

NoteSeq blank_seq(int spm, int measures) {
  NoteSeq seq;
  seq.codes.assign(static_cast<size_t>(spm) * static_cast<size_t>(measures), kRestCode);
  seq.steps_per_measure = spm;
  seq.measures = measures;
  return seq;
}

// Writes one struck chord tone: onset plus extensions, clipped to the measure.
void write_note(NoteSeq& voice, int start, int duration, int measure_end, int pitch) {
  if (start >= measure_end) return;
  voice.codes[static_cast<size_t>(start)] = pitch;
  for (int i = start + 1; i < std::min(start + duration, measure_end); ++i) {
    voice.codes[static_cast<size_t>(i)] = kExtendCode;
  }
}

}  // namespace

ChordTrack realize_mode(const std::vector<Voicing>& voicing_per_measure, ChordPlayMode mode,
                        double arousal, const TimeSignature& ts, Rng& rng) {
  const int spm = ts.steps_per_measure();
  const int measures = static_cast<int>(voicing_per_measure.size());
  ChordTrack track;

  if (mode == ChordPlayMode::Arpeggio) {
    // Note length runs from a sixteenth at full arousal to a half note at rest.
    const int duration = arousal > 0.75 ? 1 : arousal > 0.5 ? 2 : arousal > 0.25 ? 4 : 8;
    NoteSeq voice = blank_seq(spm, measures);
    for (int m = 0; m < measures; ++m) {
      const auto& pitches = voicing_per_measure[static_cast<size_t>(m)].pitches;
      if (pitches.empty()) continue;
      // Up then down without repeating the endpoints.
      std::vector<int> cycle(pitches);
      for (size_t i = pitches.size() - 1; i > 1; --i) cycle.push_back(pitches[i - 1]);
      const int measure_start = m * spm;
      int slot = 0;
      for (int start = 0; start < spm; start += duration, ++slot) {
        write_note(voice, measure_start + start, duration, measure_start + spm,
                   cycle[static_cast<size_t>(slot) % cycle.size()]);
      }
    }
    track.voices.push_back(std::move(voice));
    return track;
  }

  size_t voice_count = 0;
  for (const auto& voicing : voicing_per_measure) {
    voice_count = std::max(voice_count, voicing.pitches.size());
  }
  for (size_t v = 0; v < voice_count; ++v) track.voices.push_back(blank_seq(spm, measures));

  if (mode == ChordPlayMode::Continuous) {
    for (int m = 0; m < measures; ++m) {
      const auto& pitches = voicing_per_measure[static_cast<size_t>(m)].pitches;
      for (size_t v = 0; v < pitches.size(); ++v) {
        write_note(track.voices[v], m * spm, spm, (m + 1) * spm, pitches[v]);
      }
    }
    return track;
  }

  // Repeated: strike stride and length follow arousal; repetitions after the
  // first are randomly dropped, up to 40% of them at the lowest arousal.
  const int stride = arousal < 0.25 ? 8 : arousal < 0.625 ? 4 : 2;
  const int strike_len = std::max(1, stride / 2);
  const double omit_prob = 0.4 * (1.0 - arousal);
  for (int m = 0; m < measures; ++m) {
    const auto& pitches = voicing_per_measure[static_cast<size_t>(m)].pitches;
    for (int start = 0; start < spm; start += stride) {
      if (start > 0 && rng.bernoulli(omit_prob)) continue;
      for (size_t v = 0; v < pitches.size(); ++v) {
        write_note(track.voices[v], m * spm + start, strike_len, (m + 1) * spm, pitches[v]);
      }
    }
  }
  return track;
}

ChordTrack generate_chord_track(const Section& section, int measures, ChordPlayMode mode,
                                double valence, double arousal, Rng& rng) {
  std::vector<Voicing> voicings;
  voicings.reserve(static_cast<size_t>(measures));
  for (int m = 0; m < measures; ++m) {
    const ChordSymbol& chord = section.chord_at_measure(m);
    voicings.push_back(place_voicing(chord.root, size_voicing(chord, arousal), valence));
  }
  return realize_mode(voicings, mode, arousal, section.time_signature, rng);
}

}  // namespace m6
