#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace m6 {

// Validation failure with the JSON path of the offending value.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct TimeSignature {
  int numerator = 4;
  int denominator = 4;  // power of two, <= 16 (grid resolution is the sixteenth)

  int steps_per_measure() const { return numerator * (16 / denominator); }
  std::string str() const;
  bool operator==(const TimeSignature&) const = default;
};

enum class ScaleKind {
  Major,
  NaturalMinor,
  HarmonicMinor,
  MelodicMinor,
  Dorian,
  Phrygian,
  Lydian,
  Mixolydian,
  Locrian,
  MajorPentatonic,
  MinorPentatonic,
  Blues,
};

inline constexpr int kScaleKindCount = 12;

const char* scale_kind_name(ScaleKind kind);
bool scale_kind_from_name(const std::string& name, ScaleKind* out);

struct Scale {
  int root = 0;  // pitch class 0-11
  ScaleKind kind = ScaleKind::Major;

  std::vector<int> pitch_classes() const;
  uint16_t mask() const;  // bit pc set when pc is a member
  bool contains_pitch(int midi_pitch) const;
  bool operator==(const Scale&) const = default;
};

enum class ChordQuality { Maj, Min, Dim, Aug, Maj7, Min7, Dom7, Sus2, Sus4, Maj9, Min9 };

struct ChordSymbol {
  int root = 0;  // pitch class 0-11
  ChordQuality quality = ChordQuality::Maj;
  std::string name;  // symbol as written ("Am", "G7", ...)

  // Semitone offsets from the root in root position (may exceed 11 for 9ths).
  std::vector<int> intervals() const;
  // Root position order, reduced mod 12 ("Am" -> 9, 0, 4).
  std::vector<int> pitch_classes() const;
  uint16_t mask() const;
  // The chord-fifth offset: 6 for dim, 8 for aug, 7 otherwise.
  int fifth_interval() const;
  bool operator==(const ChordSymbol&) const = default;
};

// Parses "<root><accidental?><quality?>" ("C", "Am", "F#maj7", "Bbsus4").
// Throws SchemaError on an unknown quality token or malformed root.
ChordSymbol resolve_chord(const std::string& symbol);

enum class TrackRole { Melody, Bass, Motif, Chords, Drums };

enum class MelodicMode {
  Melody,
  Solo,
  ShortRiff,
  LongRiff,
  Bassline,
  RepetitiveBassline,
  LongMotif,
  OpeningMotif,
  ClosingMotif,
  RepeatedMotif,
  ShortRepeatedMotif,
};

enum class ChordPlayMode { Continuous, Repeated, Arpeggio };
enum class DrumMode { OnlyBeat, DrumSolo, Standard };
enum class DrumKit { Standard, Ethnic, Orchestral };

const char* track_role_name(TrackRole role);
const char* melodic_mode_name(MelodicMode mode);
const char* chord_play_mode_name(ChordPlayMode mode);
const char* drum_mode_name(DrumMode mode);
const char* drum_kit_name(DrumKit kit);

struct TrackSpec {
  TrackRole role = TrackRole::Melody;
  int program = 0;                 // GM program 0-127 (melodic roles)
  DrumKit kit = DrumKit::Standard; // drums role only
  MelodicMode melodic_mode = MelodicMode::Melody;
  ChordPlayMode chord_mode = ChordPlayMode::Continuous;
  DrumMode drum_mode = DrumMode::Standard;
  std::string instrument_name;     // instrument as written in the JSON
};

struct Section {
  int bpm = 120;  // 20-300
  TimeSignature time_signature;
  Scale scale;
  std::vector<ChordSymbol> chord_progression;  // one chord per measure, cycled
  std::vector<TrackSpec> tracks;
  int repeats = 1;
  // Length of one pass in measures. Defaults to the progression length; a
  // shorter progression cycles, a longer one is truncated per repeat.
  int measures = 0;

  int steps_per_measure() const { return time_signature.steps_per_measure(); }
  const ChordSymbol& chord_at_measure(int measure) const;
};

struct ArrangementEntry {
  std::string section_id;
  double valence = 0.0;  // [-1, 1]
  double arousal = 0.5;  // [0, 1]
};

struct Composition {
  std::string name;
  std::map<std::string, Section> sections;
  std::vector<ArrangementEntry> arrangement;
  std::string composer_note;

  const Section& section(const std::string& id) const { return sections.at(id); }
};

// Parses and fully validates a composition document (schema_version 1).
// Every error carries the JSON path of the offending value.
Composition parse_composition(const std::string& json_text);

// Canonical serialization; parse(serialize(c)) == c.
std::string serialize_composition(const Composition& composition);

// General MIDI program helpers.
const char* gm_program_name(int program);
bool gm_program_from_name(const std::string& name, int* out);

}  // namespace m6
