#include "m6/assembler.h"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace m6 {

std::vector<NoteEvent> merge_voices(std::span<const NoteSeq> voices, uint8_t velocity) {
  std::vector<NoteEvent> events;
  for (const NoteSeq& voice : voices) {
    for (const SoundedNote& note : sounded_notes(voice)) {
      events.push_back({note.onset * kTicksPerStep, true, static_cast<uint8_t>(note.pitch),
                        velocity});
      events.push_back({(note.onset + note.duration) * kTicksPerStep, false,
                        static_cast<uint8_t>(note.pitch), 0});
    }
  }
  std::sort(events.begin(), events.end(), [](const NoteEvent& a, const NoteEvent& b) {
    if (a.tick != b.tick) return a.tick < b.tick;
    if (a.on != b.on) return !a.on;  // offs first
    return a.pitch < b.pitch;
  });
  return events;
}

// ---------------------------------------------------------------------------
// SMF encoding
// ---------------------------------------------------------------------------

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v & 0xff));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<uint8_t>(v & 0xff));
}

void put_vlq(std::vector<uint8_t>& out, uint32_t value) {
  uint8_t stack[5];
  int n = 0;
  stack[n++] = static_cast<uint8_t>(value & 0x7f);
  while ((value >>= 7) != 0) stack[n++] = static_cast<uint8_t>((value & 0x7f) | 0x80);
  while (n-- > 0) out.push_back(stack[n]);
}

class SmfTrack {
 public:
  void event_at(int tick, std::initializer_list<uint8_t> bytes) {
    put_vlq(data_, static_cast<uint32_t>(tick - last_tick_));
    last_tick_ = tick;
    data_.insert(data_.end(), bytes.begin(), bytes.end());
  }

  void meta_at(int tick, uint8_t type, const std::vector<uint8_t>& payload) {
    put_vlq(data_, static_cast<uint32_t>(tick - last_tick_));
    last_tick_ = tick;
    data_.push_back(0xff);
    data_.push_back(type);
    put_vlq(data_, static_cast<uint32_t>(payload.size()));
    data_.insert(data_.end(), payload.begin(), payload.end());
  }

  void finish(int end_tick) { meta_at(std::max(end_tick, last_tick_), 0x2f, {}); }

  void write_chunk(std::vector<uint8_t>& out) const {
    out.push_back('M');
    out.push_back('T');
    out.push_back('r');
    out.push_back('k');
    put_u32(out, static_cast<uint32_t>(data_.size()));
    out.insert(out.end(), data_.begin(), data_.end());
  }

 private:
  std::vector<uint8_t> data_;
  int last_tick_ = 0;
};

}  // namespace

std::vector<uint8_t> assemble(const Composition& composition,
                              const std::vector<TrackSet>& tracksets) {
  if (tracksets.size() != composition.arrangement.size()) {
    throw std::invalid_argument("one trackset required per arrangement entry");
  }

  // Section start ticks.
  std::vector<int> starts;
  int song_end = 0;
  for (const TrackSet& trackset : tracksets) {
    starts.push_back(song_end);
    song_end += trackset.duration_ticks;
  }

  // Conductor track: tempo and time signature at every section boundary.
  SmfTrack conductor;
  conductor.meta_at(0, 0x03,
                    std::vector<uint8_t>(composition.name.begin(), composition.name.end()));
  for (size_t i = 0; i < tracksets.size(); ++i) {
    const TrackSet& trackset = tracksets[i];
    const uint32_t us_per_quarter = 60000000u / static_cast<uint32_t>(trackset.bpm);
    conductor.meta_at(starts[i], 0x51,
                      {static_cast<uint8_t>(us_per_quarter >> 16),
                       static_cast<uint8_t>((us_per_quarter >> 8) & 0xff),
                       static_cast<uint8_t>(us_per_quarter & 0xff)});
    const auto denominator_log2 = static_cast<uint8_t>(
        std::countr_zero(static_cast<unsigned>(trackset.time_signature.denominator)));
    conductor.meta_at(starts[i], 0x58,
                      {static_cast<uint8_t>(trackset.time_signature.numerator),
                       denominator_log2, 24, 8});
  }
  conductor.finish(song_end);

  std::vector<SmfTrack> note_tracks;
  for (size_t i = 0; i < tracksets.size(); ++i) {
    const TrackSet& trackset = tracksets[i];
    for (const TrackEvents& track : trackset.tracks) {
      SmfTrack smf;
      smf.meta_at(starts[i], 0x03, std::vector<uint8_t>(track.name.begin(), track.name.end()));
      if (track.program >= 0) {
        smf.event_at(starts[i], {static_cast<uint8_t>(0xc0 | track.channel),
                                 static_cast<uint8_t>(track.program)});
      }
      for (const NoteEvent& event : track.events) {
        if (event.tick < 0 || event.tick > trackset.duration_ticks) {
          throw std::invalid_argument("note event beyond section duration in '" +
                                      trackset.section_id + "'");
        }
        const uint8_t status =
            static_cast<uint8_t>((event.on ? 0x90 : 0x80) | track.channel);
        smf.event_at(starts[i] + event.tick, {status, event.pitch, event.velocity});
      }
      smf.finish(starts[i] + trackset.duration_ticks);
      note_tracks.push_back(std::move(smf));
    }
  }

  std::vector<uint8_t> out;
  out.reserve(1024);
  out.push_back('M');
  out.push_back('T');
  out.push_back('h');
  out.push_back('d');
  put_u32(out, 6);
  put_u16(out, 1);  // format 1
  put_u16(out, static_cast<uint16_t>(1 + note_tracks.size()));
  put_u16(out, kTicksPerQuarter);
  conductor.write_chunk(out);
  for (const SmfTrack& track : note_tracks) track.write_chunk(out);
  return out;
}

}  // namespace m6
