#include "m6/schema.h"

#include <algorithm>
#include <array>
#include <cctype>

#include <json.hpp>

namespace m6 {

using nlohmann::json;

namespace {

struct ScaleDef {
  const char* name;
  std::array<int, 7> steps;
  int size;
};

constexpr std::array<ScaleDef, kScaleKindCount> kScaleDefs = {{
    {"major", {0, 2, 4, 5, 7, 9, 11}, 7},
    {"natural_minor", {0, 2, 3, 5, 7, 8, 10}, 7},
    {"harmonic_minor", {0, 2, 3, 5, 7, 8, 11}, 7},
    {"melodic_minor", {0, 2, 3, 5, 7, 9, 11}, 7},
    {"dorian", {0, 2, 3, 5, 7, 9, 10}, 7},
    {"phrygian", {0, 1, 3, 5, 7, 8, 10}, 7},
    {"lydian", {0, 2, 4, 6, 7, 9, 11}, 7},
    {"mixolydian", {0, 2, 4, 5, 7, 9, 10}, 7},
    {"locrian", {0, 1, 3, 5, 6, 8, 10}, 7},
    {"major_pentatonic", {0, 2, 4, 7, 9, 0, 0}, 5},
    {"minor_pentatonic", {0, 3, 5, 7, 10, 0, 0}, 5},
    {"blues", {0, 3, 5, 6, 7, 10, 0}, 6},
}};

struct QualityDef {
  ChordQuality quality;
  const char* canonical;      // suffix used when serializing
  std::array<int, 5> offsets;
  int size;
};

constexpr std::array<QualityDef, 11> kQualityDefs = {{
    {ChordQuality::Maj, "", {0, 4, 7, 0, 0}, 3},
    {ChordQuality::Min, "m", {0, 3, 7, 0, 0}, 3},
    {ChordQuality::Dim, "dim", {0, 3, 6, 0, 0}, 3},
    {ChordQuality::Aug, "aug", {0, 4, 8, 0, 0}, 3},
    {ChordQuality::Maj7, "maj7", {0, 4, 7, 11, 0}, 4},
    {ChordQuality::Min7, "m7", {0, 3, 7, 10, 0}, 4},
    {ChordQuality::Dom7, "7", {0, 4, 7, 10, 0}, 4},
    {ChordQuality::Sus2, "sus2", {0, 2, 7, 0, 0}, 3},
    {ChordQuality::Sus4, "sus4", {0, 5, 7, 0, 0}, 3},
    {ChordQuality::Maj9, "maj9", {0, 4, 7, 11, 14}, 5},
    {ChordQuality::Min9, "m9", {0, 3, 7, 10, 14}, 5},
}};

const QualityDef& quality_def(ChordQuality q) {
  for (const auto& def : kQualityDefs) {
    if (def.quality == q) return def;
  }
  return kQualityDefs[0];
}

int pitch_class_from_letter(char letter) {
  switch (std::toupper(static_cast<unsigned char>(letter))) {
    case 'C': return 0;
    case 'D': return 2;
    case 'E': return 4;
    case 'F': return 5;
    case 'G': return 7;
    case 'A': return 9;
    case 'B': return 11;
    default: return -1;
  }
}

const char* kPitchClassNames[12] = {"C",  "C#", "D",  "D#", "E",  "F",
                                    "F#", "G",  "G#", "A",  "A#", "B"};

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw SchemaError(path, message);
}

// ---------------------------------------------------------------------------
// Field access helpers; every failure reports the JSON path.
// ---------------------------------------------------------------------------

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required field");
  return *it;
}

std::string require_string(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

int require_int(const json& obj, const std::string& path, const char* key, int lo, int hi) {
  const json& v = require(obj, path, key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  const int n = v.get<int>();
  if (n < lo || n > hi) {
    fail(path + "." + key,
         "value " + std::to_string(n) + " outside range [" + std::to_string(lo) + ", " +
             std::to_string(hi) + "]");
  }
  return n;
}

double require_real(const json& obj, const std::string& path, const char* key, double lo,
                    double hi) {
  const json& v = require(obj, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!(x >= lo && x <= hi)) {
    fail(path + "." + key,
         "value " + std::to_string(x) + " outside range [" + std::to_string(lo) + ", " +
             std::to_string(hi) + "]");
  }
  return x;
}

TimeSignature parse_time_signature(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected \"N/D\" string");
  const std::string text = v.get<std::string>();
  const auto slash = text.find('/');
  if (slash == std::string::npos) fail(path, "expected \"N/D\" string");
  TimeSignature ts;
  try {
    ts.numerator = std::stoi(text.substr(0, slash));
    ts.denominator = std::stoi(text.substr(slash + 1));
  } catch (const std::exception&) {
    fail(path, "expected \"N/D\" string");
  }
  if (ts.numerator < 1 || ts.numerator > 32) fail(path, "numerator outside range [1, 32]");
  if (ts.denominator != 1 && ts.denominator != 2 && ts.denominator != 4 &&
      ts.denominator != 8 && ts.denominator != 16) {
    fail(path, "denominator must be one of 1, 2, 4, 8, 16");
  }
  return ts;
}

int parse_root(const json& v, const std::string& path) {
  if (v.is_number_integer()) {
    const int pc = v.get<int>();
    if (pc < 0 || pc > 11) fail(path, "pitch class outside range [0, 11]");
    return pc;
  }
  if (v.is_string()) {
    const std::string text = v.get<std::string>();
    if (text.empty()) fail(path, "empty note name");
    int pc = pitch_class_from_letter(text[0]);
    if (pc < 0) fail(path, "unknown note name '" + text + "'");
    for (size_t i = 1; i < text.size(); ++i) {
      if (text[i] == '#') {
        pc += 1;
      } else if (text[i] == 'b') {
        pc -= 1;
      } else {
        fail(path, "unknown note name '" + text + "'");
      }
    }
    return ((pc % 12) + 12) % 12;
  }
  fail(path, "expected a note name or pitch class integer");
}

Scale parse_scale(const json& v, const std::string& path) {
  Scale scale;
  scale.root = parse_root(require(v, path, "root"), path + ".root");
  const std::string kind = require_string(v, path, "kind");
  if (!scale_kind_from_name(kind, &scale.kind)) {
    fail(path + ".kind", "unknown scale kind '" + kind + "'");
  }
  return scale;
}

template <typename Enum>
Enum parse_enum_field(const json& obj, const std::string& path, const char* key,
                      const std::vector<std::pair<const char*, Enum>>& table) {
  const std::string text = require_string(obj, path, key);
  for (const auto& [name, value] : table) {
    if (text == name) return value;
  }
  std::string expected;
  for (const auto& [name, value] : table) {
    if (!expected.empty()) expected += ", ";
    expected += name;
  }
  fail(path + "." + key, "unknown value '" + text + "' (expected one of: " + expected + ")");
}

const std::vector<std::pair<const char*, TrackRole>> kRoleNames = {
    {"melody", TrackRole::Melody}, {"bass", TrackRole::Bass},
    {"motif", TrackRole::Motif},   {"chords", TrackRole::Chords},
    {"drums", TrackRole::Drums},
};

const std::vector<std::pair<const char*, MelodicMode>> kMelodyModes = {
    {"melody", MelodicMode::Melody},
    {"solo", MelodicMode::Solo},
};

const std::vector<std::pair<const char*, MelodicMode>> kBassModes = {
    {"short_riff", MelodicMode::ShortRiff},
    {"long_riff", MelodicMode::LongRiff},
    {"bassline", MelodicMode::Bassline},
    {"repetitive_bassline", MelodicMode::RepetitiveBassline},
};

const std::vector<std::pair<const char*, MelodicMode>> kMotifModes = {
    {"long_motif", MelodicMode::LongMotif},
    {"opening_motif", MelodicMode::OpeningMotif},
    {"closing_motif", MelodicMode::ClosingMotif},
    {"repeated_motif", MelodicMode::RepeatedMotif},
    {"short_repeated_motif", MelodicMode::ShortRepeatedMotif},
};

const std::vector<std::pair<const char*, ChordPlayMode>> kChordModes = {
    {"continuous", ChordPlayMode::Continuous},
    {"repeated", ChordPlayMode::Repeated},
    {"arpeggio", ChordPlayMode::Arpeggio},
};

const std::vector<std::pair<const char*, DrumMode>> kDrumModes = {
    {"only_beat", DrumMode::OnlyBeat},
    {"drum_solo", DrumMode::DrumSolo},
    {"standard", DrumMode::Standard},
};

const std::vector<std::pair<const char*, DrumKit>> kDrumKits = {
    {"standard", DrumKit::Standard},
    {"ethnic", DrumKit::Ethnic},
    {"orchestral", DrumKit::Orchestral},
};

TrackSpec parse_track(const json& v, const std::string& path) {
  TrackSpec track;
  track.role = parse_enum_field(v, path, "role", kRoleNames);

  const json& instrument = require(v, path, "instrument");
  if (track.role == TrackRole::Drums) {
    if (!instrument.is_string()) fail(path + ".instrument", "drum tracks name a kit");
    const std::string kit = instrument.get<std::string>();
    bool found = false;
    for (const auto& [name, value] : kDrumKits) {
      if (kit == name) {
        track.kit = value;
        found = true;
      }
    }
    if (!found) fail(path + ".instrument", "unknown drum kit '" + kit + "'");
    track.instrument_name = kit;
  } else if (instrument.is_number_integer()) {
    const int program = instrument.get<int>();
    if (program < 0 || program > 127) {
      fail(path + ".instrument", "GM program outside range [0, 127]");
    }
    track.program = program;
    track.instrument_name = gm_program_name(program);
  } else if (instrument.is_string()) {
    const std::string name = instrument.get<std::string>();
    if (!gm_program_from_name(name, &track.program)) {
      fail(path + ".instrument", "unknown GM instrument '" + name + "'");
    }
    track.instrument_name = gm_program_name(track.program);
  } else {
    fail(path + ".instrument", "expected a GM program number or name");
  }

  switch (track.role) {
    case TrackRole::Melody:
      track.melodic_mode = parse_enum_field(v, path, "mode", kMelodyModes);
      break;
    case TrackRole::Bass:
      track.melodic_mode = parse_enum_field(v, path, "mode", kBassModes);
      break;
    case TrackRole::Motif:
      track.melodic_mode = parse_enum_field(v, path, "mode", kMotifModes);
      break;
    case TrackRole::Chords:
      track.chord_mode = parse_enum_field(v, path, "mode", kChordModes);
      break;
    case TrackRole::Drums:
      track.drum_mode = parse_enum_field(v, path, "mode", kDrumModes);
      break;
  }
  return track;
}

Section parse_section(const json& v, const std::string& path) {
  Section section;
  section.bpm = require_int(v, path, "bpm", 20, 300);
  section.time_signature = parse_time_signature(require(v, path, "time_signature"),
                                                path + ".time_signature");
  section.scale = parse_scale(require(v, path, "scale"), path + ".scale");

  const json& chords = require(v, path, "chord_progression");
  if (!chords.is_array() || chords.empty()) {
    fail(path + ".chord_progression", "expected a non-empty array of chord symbols");
  }
  for (size_t i = 0; i < chords.size(); ++i) {
    const std::string item_path = path + ".chord_progression[" + std::to_string(i) + "]";
    if (!chords[i].is_string()) fail(item_path, "expected a chord symbol string");
    try {
      section.chord_progression.push_back(resolve_chord(chords[i].get<std::string>()));
    } catch (const SchemaError& e) {
      fail(item_path, e.what());
    }
  }

  const json& tracks = require(v, path, "tracks");
  if (!tracks.is_array()) fail(path + ".tracks", "expected an array");
  int melodic_count = 0;
  for (size_t i = 0; i < tracks.size(); ++i) {
    section.tracks.push_back(parse_track(tracks[i], path + ".tracks[" + std::to_string(i) + "]"));
    if (section.tracks.back().role != TrackRole::Drums) ++melodic_count;
  }
  // Channels 0-8 are available for melodic tracks; 9 is percussion.
  if (melodic_count > 9) {
    fail(path + ".tracks", "more than 9 non-drum tracks cannot be assigned MIDI channels");
  }

  if (v.contains("repeats")) {
    section.repeats = require_int(v, path, "repeats", 1, 64);
  }
  if (v.contains("measures")) {
    section.measures = require_int(v, path, "measures", 1, 512);
  } else {
    section.measures = static_cast<int>(section.chord_progression.size());
  }
  return section;
}

}  // namespace

// ---------------------------------------------------------------------------
// TimeSignature / Scale / ChordSymbol
// ---------------------------------------------------------------------------

std::string TimeSignature::str() const {
  return std::to_string(numerator) + "/" + std::to_string(denominator);
}

const char* scale_kind_name(ScaleKind kind) {
  return kScaleDefs[static_cast<size_t>(kind)].name;
}

bool scale_kind_from_name(const std::string& name, ScaleKind* out) {
  std::string folded;
  for (char c : name) {
    folded.push_back(c == ' ' || c == '-' ? '_'
                                          : static_cast<char>(std::tolower(
                                                static_cast<unsigned char>(c))));
  }
  if (folded == "minor") folded = "natural_minor";
  for (size_t i = 0; i < kScaleDefs.size(); ++i) {
    if (folded == kScaleDefs[i].name) {
      *out = static_cast<ScaleKind>(i);
      return true;
    }
  }
  return false;
}

std::vector<int> Scale::pitch_classes() const {
  const ScaleDef& def = kScaleDefs[static_cast<size_t>(kind)];
  std::vector<int> out;
  out.reserve(static_cast<size_t>(def.size));
  for (int i = 0; i < def.size; ++i) out.push_back((root + def.steps[static_cast<size_t>(i)]) % 12);
  return out;
}

uint16_t Scale::mask() const {
  uint16_t m = 0;
  for (int pc : pitch_classes()) m |= static_cast<uint16_t>(1u << pc);
  return m;
}

bool Scale::contains_pitch(int midi_pitch) const {
  return (mask() >> (((midi_pitch % 12) + 12) % 12)) & 1u;
}

std::vector<int> ChordSymbol::intervals() const {
  const QualityDef& def = quality_def(quality);
  return std::vector<int>(def.offsets.begin(), def.offsets.begin() + def.size);
}

std::vector<int> ChordSymbol::pitch_classes() const {
  std::vector<int> out;
  for (int offset : intervals()) out.push_back((root + offset) % 12);
  return out;
}

uint16_t ChordSymbol::mask() const {
  uint16_t m = 0;
  for (int pc : pitch_classes()) m |= static_cast<uint16_t>(1u << pc);
  return m;
}

int ChordSymbol::fifth_interval() const {
  if (quality == ChordQuality::Dim) return 6;
  if (quality == ChordQuality::Aug) return 8;
  return 7;
}

ChordSymbol resolve_chord(const std::string& symbol) {
  if (symbol.empty()) throw SchemaError("", "empty chord symbol");
  ChordSymbol chord;
  chord.name = symbol;
  int pc = pitch_class_from_letter(symbol[0]);
  if (pc < 0) throw SchemaError("", "unknown chord root in '" + symbol + "'");
  size_t pos = 1;
  while (pos < symbol.size() && (symbol[pos] == '#' || symbol[pos] == 'b')) {
    pc += symbol[pos] == '#' ? 1 : -1;
    ++pos;
  }
  chord.root = ((pc % 12) + 12) % 12;

  const std::string suffix = symbol.substr(pos);
  bool found = false;
  for (const auto& def : kQualityDefs) {
    if (suffix == def.canonical) {
      chord.quality = def.quality;
      found = true;
      break;
    }
  }
  // Common aliases.
  if (!found) {
    if (suffix == "maj") {
      chord.quality = ChordQuality::Maj;
    } else if (suffix == "min") {
      chord.quality = ChordQuality::Min;
    } else if (suffix == "min7") {
      chord.quality = ChordQuality::Min7;
    } else if (suffix == "min9") {
      chord.quality = ChordQuality::Min9;
    } else if (suffix == "dom7") {
      chord.quality = ChordQuality::Dom7;
    } else {
      throw SchemaError("", "unknown chord quality '" + suffix + "' in '" + symbol + "'");
    }
  }
  return chord;
}

const char* track_role_name(TrackRole role) {
  for (const auto& [name, value] : kRoleNames) {
    if (value == role) return name;
  }
  return "";
}

const char* melodic_mode_name(MelodicMode mode) {
  for (const auto* table : {&kMelodyModes, &kBassModes, &kMotifModes}) {
    for (const auto& [name, value] : *table) {
      if (value == mode) return name;
    }
  }
  return "";
}

const char* chord_play_mode_name(ChordPlayMode mode) {
  for (const auto& [name, value] : kChordModes) {
    if (value == mode) return name;
  }
  return "";
}

const char* drum_mode_name(DrumMode mode) {
  for (const auto& [name, value] : kDrumModes) {
    if (value == mode) return name;
  }
  return "";
}

const char* drum_kit_name(DrumKit kit) {
  for (const auto& [name, value] : kDrumKits) {
    if (value == kit) return name;
  }
  return "";
}

const ChordSymbol& Section::chord_at_measure(int measure) const {
  const size_t n = chord_progression.size();
  return chord_progression[static_cast<size_t>(measure) % n];
}

// ---------------------------------------------------------------------------
// Composition parsing
// ---------------------------------------------------------------------------

Composition parse_composition(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("", "top level must be an object");

  const int version = require_int(doc, "", "schema_version", 1, 1);
  (void)version;

  Composition composition;
  composition.name = require_string(doc, "", "name");
  if (doc.contains("composer_note")) {
    if (!doc["composer_note"].is_string()) fail(".composer_note", "expected a string");
    composition.composer_note = doc["composer_note"].get<std::string>();
  }

  const json& sections = require(doc, "", "sections");
  if (!sections.is_object() || sections.empty()) {
    fail(".sections", "expected a non-empty object of sections");
  }
  for (const auto& [id, body] : sections.items()) {
    composition.sections.emplace(id, parse_section(body, ".sections." + id));
  }

  const json& arrangement = require(doc, "", "arrangement");
  if (!arrangement.is_array() || arrangement.empty()) {
    fail(".arrangement", "expected a non-empty array");
  }
  for (size_t i = 0; i < arrangement.size(); ++i) {
    const std::string path = ".arrangement[" + std::to_string(i) + "]";
    const json& entry = arrangement[i];
    ArrangementEntry out;
    out.section_id = require_string(entry, path, "section");
    if (!composition.sections.contains(out.section_id)) {
      fail(path + ".section", "unknown section '" + out.section_id + "'");
    }
    out.valence = require_real(entry, path, "valence", -1.0, 1.0);
    out.arousal = require_real(entry, path, "arousal", 0.0, 1.0);
    composition.arrangement.push_back(std::move(out));
  }
  return composition;
}

std::string serialize_composition(const Composition& composition) {
  json doc;
  doc["schema_version"] = 1;
  doc["name"] = composition.name;
  doc["composer_note"] = composition.composer_note;

  json sections = json::object();
  for (const auto& [id, section] : composition.sections) {
    json s;
    s["bpm"] = section.bpm;
    s["time_signature"] = section.time_signature.str();
    s["scale"] = {{"root", kPitchClassNames[section.scale.root]},
                  {"kind", scale_kind_name(section.scale.kind)}};
    json chords = json::array();
    for (const auto& chord : section.chord_progression) chords.push_back(chord.name);
    s["chord_progression"] = std::move(chords);
    json tracks = json::array();
    for (const auto& track : section.tracks) {
      json t;
      t["role"] = track_role_name(track.role);
      if (track.role == TrackRole::Drums) {
        t["instrument"] = drum_kit_name(track.kit);
        t["mode"] = drum_mode_name(track.drum_mode);
      } else {
        t["instrument"] = track.program;
        t["mode"] = track.role == TrackRole::Chords
                        ? chord_play_mode_name(track.chord_mode)
                        : melodic_mode_name(track.melodic_mode);
      }
      tracks.push_back(std::move(t));
    }
    s["tracks"] = std::move(tracks);
    s["repeats"] = section.repeats;
    s["measures"] = section.measures;
    sections[id] = std::move(s);
  }
  doc["sections"] = std::move(sections);

  json arrangement = json::array();
  for (const auto& entry : composition.arrangement) {
    arrangement.push_back({{"section", entry.section_id},
                           {"valence", entry.valence},
                           {"arousal", entry.arousal}});
  }
  doc["arrangement"] = std::move(arrangement);
  return doc.dump(2);
}

}  // namespace m6
