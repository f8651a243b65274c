#include "m6/song.h"

#include <algorithm>
#include <cassert>

#include "m6/harmony_tracks.h"
#include "m6/melodic_tracks.h"
#include "m6/percussion.h"
#include "m6/rng.h"

namespace m6 {

namespace {

std::vector<NoteEvent> drum_events(const DrumGrid& grid, DrumKit kit) {
  std::vector<NoteEvent> events;
  for (int step = 0; step < grid.length(); ++step) {
    const uint16_t state = grid.states[static_cast<size_t>(step)];
    for (int component = 1; component <= 12; ++component) {
      if (!(state & component_bit(component))) continue;
      const bool accent = component == kKickDrum || component == kCrashCymbal;
      const auto pitch = static_cast<uint8_t>(kit_note(kit, component));
      const uint8_t velocity = accent ? kAccentVelocity : kDrumVelocity;
      events.push_back({step * kTicksPerStep, true, pitch, velocity});
      events.push_back({(step + 1) * kTicksPerStep, false, pitch, 0});
    }
  }
  std::sort(events.begin(), events.end(), [](const NoteEvent& a, const NoteEvent& b) {
    if (a.tick != b.tick) return a.tick < b.tick;
    if (a.on != b.on) return !a.on;
    return a.pitch < b.pitch;
  });
  return events;
}

std::vector<NoteEvent> tile_events(const std::vector<NoteEvent>& pass, int pass_ticks,
                                   int repeats) {
  std::vector<NoteEvent> out;
  out.reserve(pass.size() * static_cast<size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    for (NoteEvent event : pass) {
      event.tick += r * pass_ticks;
      out.push_back(event);
    }
  }
  return out;
}

// Generation order: chords fix the harmonic reference, bass comes next, and
// everything else follows.
int role_rank(TrackRole role) {
  switch (role) {
    case TrackRole::Chords: return 0;
    case TrackRole::Bass: return 1;
    default: return 2;
  }
}

struct GeneratedPass {
  std::vector<std::vector<NoteEvent>> per_track;
  std::vector<TrackCurve> curves;
};

GeneratedPass generate_pass(const ArrangementEntry& entry, const Section& section,
                            int entry_index, const EngineConfig& config, uint64_t seed,
                            int repeat_index) {
  const int measures = section.measures;
  const HarmonicContext ctx = HarmonicContext::for_section(section, measures);
  const Emotion emotion{entry.valence, entry.arousal};
  const BeatTable beat_table = BeatTable::defaults();
  const FillChain fill_chain = FillChain::defaults();

  std::vector<size_t> order(section.tracks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&section](size_t a, size_t b) {
    return role_rank(section.tracks[a].role) < role_rank(section.tracks[b].role);
  });

  GeneratedPass pass;
  pass.per_track.resize(section.tracks.size());

  const NoteSeq* chord_ref = nullptr;
  const NoteSeq* bass_ref = nullptr;
  std::vector<NoteSeq> generated;  // stable storage for references
  generated.reserve(section.tracks.size() + 8);

  for (size_t idx : order) {
    const TrackSpec& track = section.tracks[idx];
    uint64_t track_seed =
        derive_seed(seed, entry.section_id, entry_index, static_cast<int>(idx));
    if (repeat_index > 0) {
      track_seed = hash_combine(track_seed, static_cast<uint64_t>(repeat_index));
    }

    switch (track.role) {
      case TrackRole::Chords: {
        Rng rng(track_seed);
        const ChordTrack chords = generate_chord_track(section, measures, track.chord_mode,
                                                       entry.valence, entry.arousal, rng);
        pass.per_track[idx] = merge_voices(chords.voices, kMelodicVelocity);
        if (!chord_ref && !chords.voices.empty()) {
          generated.push_back(chords.voices.front());
          chord_ref = &generated.back();
        }
        break;
      }
      case TrackRole::Drums: {
        Rng rng(track_seed);
        const DrumGrid grid =
            generate_drum_track(section, measures, emotion, track.drum_mode, rng, beat_table,
                                fill_chain, config.drums);
        pass.per_track[idx] = drum_events(grid, track.kit);
        break;
      }
      default: {
        std::vector<NoteSeq> refs;
        if (chord_ref) refs.push_back(*chord_ref);
        if (track.role == TrackRole::Melody && bass_ref) refs.push_back(*bass_ref);

        GaConfig ga = config.ga;
        ga.rng_seed = track_seed;
        EvolveStats stats;
        NoteSeq seq = generate_track(track.melodic_mode, section, emotion, ctx, refs, ga,
                                     config.levels, &stats);
        pass.per_track[idx] = merge_voices(std::span(&seq, 1), kMelodicVelocity);
        if (!stats.best_per_generation.empty()) {
          pass.curves.push_back({entry.section_id + ":" +
                                     melodic_mode_name(track.melodic_mode) + ":" +
                                     std::to_string(idx),
                                 stats.best_per_generation});
        }
        if (track.role == TrackRole::Bass && !bass_ref) {
          generated.push_back(seq);
          bass_ref = &generated.back();
        }
        break;
      }
    }
  }
  return pass;
}

}  // namespace

SongResult build_song(const Composition& composition, const EngineConfig& config,
                      uint64_t seed) {
  SongResult result;
  for (size_t e = 0; e < composition.arrangement.size(); ++e) {
    const ArrangementEntry& entry = composition.arrangement[e];
    const Section& section = composition.section(entry.section_id);
    const int pass_ticks =
        section.measures * section.steps_per_measure() * kTicksPerStep;

    TrackSet trackset;
    trackset.section_id = entry.section_id;
    trackset.time_signature = section.time_signature;
    trackset.bpm = section.bpm;
    trackset.duration_ticks = pass_ticks * section.repeats;

    std::vector<std::vector<NoteEvent>> expanded(section.tracks.size());
    if (config.vary_repeats) {
      for (int r = 0; r < section.repeats; ++r) {
        GeneratedPass pass =
            generate_pass(entry, section, static_cast<int>(e), config, seed, r);
        for (size_t t = 0; t < pass.per_track.size(); ++t) {
          for (NoteEvent event : pass.per_track[t]) {
            event.tick += r * pass_ticks;
            expanded[t].push_back(event);
          }
        }
        if (r == 0) {
          for (auto& curve : pass.curves) result.curves.push_back(std::move(curve));
        }
      }
    } else {
      GeneratedPass pass =
          generate_pass(entry, section, static_cast<int>(e), config, seed, 0);
      for (size_t t = 0; t < pass.per_track.size(); ++t) {
        expanded[t] = tile_events(pass.per_track[t], pass_ticks, section.repeats);
      }
      for (auto& curve : pass.curves) result.curves.push_back(std::move(curve));
    }

    uint8_t melodic_channel = 0;
    for (size_t t = 0; t < section.tracks.size(); ++t) {
      const TrackSpec& spec = section.tracks[t];
      TrackEvents track;
      track.events = std::move(expanded[t]);
      if (spec.role == TrackRole::Drums) {
        track.channel = kDrumChannel;
        track.program = -1;
        track.name = entry.section_id + ":drums:" + drum_kit_name(spec.kit);
      } else {
        track.channel = melodic_channel++;  // 0-8; parse rejects more
        track.program = spec.program;
        track.name = entry.section_id + ":" + track_role_name(spec.role);
      }
      trackset.tracks.push_back(std::move(track));
    }
    result.tracksets.push_back(std::move(trackset));
  }
  return result;
}

}  // namespace m6
