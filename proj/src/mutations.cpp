#include <algorithm>
#include <cassert>

#include "m6/evolution.h"

namespace m6 {

const char* mutation_kind_name(MutationKind kind) {
  switch (kind) {
    case MutationKind::Interval: return "interval";
    case MutationKind::Transpose: return "transpose";
    case MutationKind::Extend: return "extend";
    case MutationKind::Rest: return "rest";
    case MutationKind::LongNote: return "long_note";
    case MutationKind::ExtensionToNote: return "extension_to_note";
    case MutationKind::LengthNormalize: return "length_normalize";
    case MutationKind::Sort: return "sort";
    case MutationKind::RepeatPaste: return "repeat_paste";
    case MutationKind::RepeatAdjacent: return "repeat_adjacent";
  }
  return "";
}

namespace {

inline int clamp_pitch(int pitch) { return std::clamp(pitch, 0, 127); }

// The sequence may never open with an extension.
inline void repair_head(NoteSeq& seq) {
  if (seq.codes[0] == kExtendCode) seq.codes[0] = kRestCode;
}

}  // namespace

namespace mutations {

void interval(NoteSeq& seq, int note_index, int delta) {
  const auto notes = sounded_notes(seq);
  if (note_index < 1 || note_index >= static_cast<int>(notes.size())) return;
  const auto& prev = notes[static_cast<size_t>(note_index - 1)];
  const auto& cur = notes[static_cast<size_t>(note_index)];
  seq.codes[static_cast<size_t>(cur.onset)] = clamp_pitch(prev.pitch + delta);
}

void transpose(NoteSeq& seq, int begin, int end, int delta) {
  begin = std::max(begin, 0);
  end = std::min(end, seq.length());
  for (int i = begin; i < end; ++i) {
    int& code = seq.codes[static_cast<size_t>(i)];
    if (code >= 0) code = clamp_pitch(code + delta);
  }
}

void extend(NoteSeq& seq, int note_index) {
  const auto notes = sounded_notes(seq);
  if (note_index < 0 || note_index >= static_cast<int>(notes.size())) return;
  const auto& note = notes[static_cast<size_t>(note_index)];
  if (note.onset == 0) return;
  seq.codes[static_cast<size_t>(note.onset - 1)] = note.pitch;
  seq.codes[static_cast<size_t>(note.onset)] = kExtendCode;
}

void note_to_rest(NoteSeq& seq, int step) {
  if (step < 0 || step >= seq.length()) return;
  if (seq.codes[static_cast<size_t>(step)] >= 0) {
    seq.codes[static_cast<size_t>(step)] = kRestCode;
  }
}

void rest_to_note(NoteSeq& seq, int step, int pitch) {
  if (step < 0 || step >= seq.length()) return;
  if (seq.codes[static_cast<size_t>(step)] == kRestCode) {
    seq.codes[static_cast<size_t>(step)] = clamp_pitch(pitch);
  }
}

void long_note(NoteSeq& seq, int begin, int end) {
  begin = std::max(begin, 1);
  end = std::min(end, seq.length());
  for (int i = begin; i < end; ++i) seq.codes[static_cast<size_t>(i)] = kExtendCode;
}

void extension_to_note(NoteSeq& seq, int step, int pitch) {
  if (step < 1 || step >= seq.length()) return;
  if (seq.codes[static_cast<size_t>(step)] == kExtendCode) {
    seq.codes[static_cast<size_t>(step)] = clamp_pitch(pitch);
  }
}

void length_normalize(NoteSeq& seq, int note_index, int split) {
  constexpr int kNormalLength = 4;  // a quarter note on the sixteenth grid
  const auto notes = sounded_notes(seq);
  if (note_index < 0 || note_index >= static_cast<int>(notes.size())) return;
  const auto& note = notes[static_cast<size_t>(note_index)];
  if (note.duration > kNormalLength) {
    split = std::clamp(split, 1, note.duration - 1);
    seq.codes[static_cast<size_t>(note.onset + split)] = note.pitch;
  } else if (note.duration < kNormalLength) {
    const int end = std::min(note.onset + kNormalLength, seq.length());
    for (int i = note.onset + note.duration; i < end; ++i) {
      seq.codes[static_cast<size_t>(i)] = kExtendCode;
    }
  }
}

void sort_notes(NoteSeq& seq, int begin, int end, bool ascending) {
  begin = std::max(begin, 0);
  end = std::min(end, seq.length());
  std::vector<int> positions, pitches;
  for (int i = begin; i < end; ++i) {
    if (seq.codes[static_cast<size_t>(i)] >= 0) {
      positions.push_back(i);
      pitches.push_back(seq.codes[static_cast<size_t>(i)]);
    }
  }
  if (ascending) {
    std::sort(pitches.begin(), pitches.end());
  } else {
    std::sort(pitches.begin(), pitches.end(), std::greater<>());
  }
  for (size_t k = 0; k < positions.size(); ++k) {
    seq.codes[static_cast<size_t>(positions[k])] = pitches[k];
  }
}

void paste(NoteSeq& seq, int src, int dst, int len) {
  if (src < 0 || dst < 0 || len <= 0) return;
  len = std::min({len, seq.length() - src, seq.length() - dst});
  const std::vector<int> fragment(seq.codes.begin() + src, seq.codes.begin() + src + len);
  std::copy(fragment.begin(), fragment.end(), seq.codes.begin() + dst);
  repair_head(seq);
}

}  // namespace mutations

NoteSeq apply_mutation(MutationKind kind, const NoteSeq& seq, Rng& rng) {
  NoteSeq out = seq;
  const int len = out.length();
  switch (kind) {
    case MutationKind::Interval: {
      const auto notes = sounded_notes(out);
      if (notes.size() >= 2) {
        mutations::interval(out, rng.uniform_int(1, static_cast<int>(notes.size()) - 1),
                            rng.uniform_int(-12, 12));
      }
      break;
    }
    case MutationKind::Transpose: {
      const int begin = rng.uniform_int(0, len - 1);
      const int end = rng.uniform_int(begin + 1, len);
      mutations::transpose(out, begin, end, rng.uniform_int(-12, 12));
      break;
    }
    case MutationKind::Extend: {
      const auto notes = sounded_notes(out);
      std::vector<int> movable;
      for (size_t k = 0; k < notes.size(); ++k) {
        if (notes[k].onset > 0) movable.push_back(static_cast<int>(k));
      }
      if (!movable.empty()) {
        mutations::extend(out, movable[static_cast<size_t>(rng.pick_index(
                                   static_cast<int>(movable.size())))]);
      }
      break;
    }
    case MutationKind::Rest: {
      std::vector<int> onsets, rests;
      for (int i = 0; i < len; ++i) {
        if (out.codes[static_cast<size_t>(i)] >= 0) onsets.push_back(i);
        if (out.codes[static_cast<size_t>(i)] == kRestCode) rests.push_back(i);
      }
      bool to_rest = rng.bernoulli(0.5);
      if (to_rest && onsets.empty()) to_rest = false;
      if (!to_rest && rests.empty()) to_rest = true;
      if (to_rest && !onsets.empty()) {
        mutations::note_to_rest(
            out, onsets[static_cast<size_t>(rng.pick_index(static_cast<int>(onsets.size())))]);
      } else if (!rests.empty()) {
        mutations::rest_to_note(
            out, rests[static_cast<size_t>(rng.pick_index(static_cast<int>(rests.size())))],
            rng.uniform_int(0, 127));
      }
      break;
    }
    case MutationKind::LongNote: {
      if (len >= 2) {
        const int begin = rng.uniform_int(1, len - 1);
        const int end = rng.uniform_int(begin + 1, len);
        mutations::long_note(out, begin, end);
      }
      break;
    }
    case MutationKind::ExtensionToNote: {
      std::vector<int> extensions;
      for (int i = 1; i < len; ++i) {
        if (out.codes[static_cast<size_t>(i)] == kExtendCode) extensions.push_back(i);
      }
      if (!extensions.empty()) {
        mutations::extension_to_note(
            out,
            extensions[static_cast<size_t>(rng.pick_index(static_cast<int>(extensions.size())))],
            rng.uniform_int(0, 127));
      }
      break;
    }
    case MutationKind::LengthNormalize: {
      const auto notes = sounded_notes(out);
      std::vector<int> abnormal;
      for (size_t k = 0; k < notes.size(); ++k) {
        if (notes[k].duration != 4) abnormal.push_back(static_cast<int>(k));
      }
      if (!abnormal.empty()) {
        const int idx = abnormal[static_cast<size_t>(
            rng.pick_index(static_cast<int>(abnormal.size())))];
        const int duration = notes[static_cast<size_t>(idx)].duration;
        const int split = duration > 1 ? rng.uniform_int(1, duration - 1) : 1;
        mutations::length_normalize(out, idx, split);
      }
      break;
    }
    case MutationKind::Sort: {
      const int begin = rng.uniform_int(0, len - 1);
      const int end = rng.uniform_int(begin + 1, len);
      mutations::sort_notes(out, begin, end, rng.bernoulli(0.5));
      break;
    }
    case MutationKind::RepeatPaste: {
      if (out.measures >= 2) {
        const int spm = out.steps_per_measure;
        const int src_measure = rng.uniform_int(0, out.measures - 1);
        int dst_measure = rng.uniform_int(0, out.measures - 2);
        if (dst_measure >= src_measure) ++dst_measure;
        const int offset = rng.uniform_int(0, spm - 1);
        const int max_len = spm - offset;
        mutations::paste(out, src_measure * spm + offset, dst_measure * spm + offset,
                         rng.uniform_int(1, max_len));
      }
      break;
    }
    case MutationKind::RepeatAdjacent: {
      if (len >= 2) {
        const int src = rng.uniform_int(0, len - 2);
        const int fragment_len = rng.uniform_int(1, len - src - 1);
        mutations::paste(out, src, src + fragment_len, fragment_len);
      }
      break;
    }
  }
  assert(out.valid());
  return out;
}

std::pair<NoteSeq, NoteSeq> crossover(const NoteSeq& a, const NoteSeq& b, Rng& rng) {
  assert(a.length() == b.length());
  const int cut = rng.uniform_int(0, a.length());
  NoteSeq child1 = a, child2 = b;
  std::copy(b.codes.begin() + cut, b.codes.end(), child1.codes.begin() + cut);
  std::copy(a.codes.begin() + cut, a.codes.end(), child2.codes.begin() + cut);
  if (child1.codes[0] == kExtendCode) child1.codes[0] = kRestCode;
  if (child2.codes[0] == kExtendCode) child2.codes[0] = kRestCode;
  return {std::move(child1), std::move(child2)};
}

}  // namespace m6
