// m6 command line: generate MIDI from a composition spec or prompt, edit an
// existing session, and run the objective evaluation scenarios.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "m6/assembler.h"
#include "m6/config.h"
#include "m6/evaluation.h"
#include "m6/llm_bridge.h"
#include "m6/schema.h"
#include "m6/song.h"

namespace {

// Exit codes, also documented in the README.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSchema = 2;
constexpr int kExitLlm = 3;
constexpr int kExitIo = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out << content;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

m6::EngineConfig load_config_opt(const std::string& config_path) {
  if (config_path.empty()) return {};
  return m6::load_engine_config_file(config_path);
}

std::string stem_of(const std::string& output_path) {
  std::filesystem::path p(output_path);
  return (p.parent_path() / p.stem()).string();
}

// Generation report: the inputs needed to reproduce the run plus per-track
// convergence curves.
void write_reports(const std::string& output_path, const m6::Composition& composition,
                   const m6::SongResult& song, uint64_t seed) {
  nlohmann::json report;
  report["output"] = output_path;
  report["seed"] = seed;
  report["name"] = composition.name;
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& entry : composition.arrangement) {
    const auto& section = composition.section(entry.section_id);
    sections.push_back({{"section", entry.section_id},
                        {"valence", entry.valence},
                        {"arousal", entry.arousal},
                        {"bpm", section.bpm},
                        {"time_signature", section.time_signature.str()},
                        {"measures", section.measures},
                        {"repeats", section.repeats}});
  }
  report["arrangement"] = std::move(sections);
  nlohmann::json final_fitness = nlohmann::json::object();
  for (const auto& curve : song.curves) {
    if (!curve.best_per_generation.empty()) {
      final_fitness[curve.label] = curve.best_per_generation.back();
    }
  }
  report["final_fitness"] = std::move(final_fitness);
  write_file(stem_of(output_path) + ".report.json", report.dump(2));

  std::string csv = "track,generation,best_fitness\n";
  for (const auto& curve : song.curves) {
    for (size_t g = 0; g < curve.best_per_generation.size(); ++g) {
      csv += curve.label + "," + std::to_string(g) + "," +
             std::to_string(curve.best_per_generation[g]) + "\n";
    }
  }
  write_file(stem_of(output_path) + ".fitness.csv", csv);
}

int generate_from_composition(const m6::Composition& composition,
                              const m6::EngineConfig& config, uint64_t seed,
                              const std::string& output_path) {
  const m6::SongResult song = m6::build_song(composition, config, seed);
  const std::vector<uint8_t> midi = m6::assemble(composition, song.tracksets);
  write_file(output_path, midi);
  write_reports(output_path, composition, song, seed);
  std::cout << "wrote " << output_path << " (" << midi.size() << " bytes, seed " << seed
            << ")\n";
  return kExitOk;
}

// Sections whose parameters differ between two compositions, via the
// canonical serialization so every field counts.
std::vector<std::string> changed_sections(const m6::Composition& before,
                                          const m6::Composition& after) {
  std::vector<std::string> changed;
  const nlohmann::json a = nlohmann::json::parse(m6::serialize_composition(before));
  const nlohmann::json b = nlohmann::json::parse(m6::serialize_composition(after));
  for (const auto& [id, body] : b["sections"].items()) {
    if (!a["sections"].contains(id) || a["sections"][id] != body) changed.push_back(id);
  }
  return changed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"m6: evolutionary text-to-MIDI composition engine"};
  app.require_subcommand(1);

  // --- generate ---
  auto* generate = app.add_subcommand("generate", "Generate a MIDI file");
  std::string spec_path, prompt, output_path, config_path, model = "gpt-4", session_path;
  uint64_t seed = 42;
  generate->add_option("--spec", spec_path, "Composition JSON file");
  generate->add_option("--prompt", prompt, "Natural-language prompt (needs M6_LLM_API_KEY)");
  generate->add_option("--seed", seed, "Random seed");
  generate->add_option("-o,--output", output_path, "Output MIDI path");
  generate->add_option("--config", config_path, "Engine config JSON");
  generate->add_option("--model", model, "Chat model id for --prompt");
  generate->add_option("--session", session_path, "Session file to create for later edits");

  // --- edit ---
  auto* edit = app.add_subcommand("edit", "Revise an existing session");
  std::string edit_session, edit_prompt, revised_spec, edit_output, edit_config;
  uint64_t edit_seed = 42;
  edit->add_option("--session", edit_session, "Session JSON from a previous run")->required();
  edit->add_option("--prompt", edit_prompt, "Change request (needs M6_LLM_API_KEY)");
  edit->add_option("--revised-spec", revised_spec,
                   "Revised composition JSON (offline alternative to --prompt)");
  edit->add_option("--seed", edit_seed, "Random seed (keep it to preserve unchanged sections)");
  edit->add_option("-o,--output", edit_output, "Output MIDI path");
  edit->add_option("--config", edit_config, "Engine config JSON");

  // --- eval ---
  auto* eval = app.add_subcommand("eval", "Run an objective evaluation scenario");
  std::string scenario = "focused", eval_output, eval_format = "json", eval_config;
  int n_songs = 20;
  uint64_t eval_seed = 7;
  eval->add_option("--scenario", scenario, "focused | randomized | prompt_driven");
  eval->add_option("--n", n_songs, "Number of songs");
  eval->add_option("--seed", eval_seed, "Random seed");
  eval->add_option("-o,--output", eval_output, "Report path (stdout when omitted)");
  eval->add_option("--format", eval_format, "json | csv");
  eval->add_option("--config", eval_config, "Engine config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or help text
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) {
      if (spec_path.empty() == prompt.empty()) {
        std::cerr << "error: pass exactly one of --spec or --prompt\n";
        return kExitUsage;
      }
      const m6::EngineConfig config = load_config_opt(config_path);
      std::string json_text;
      if (!spec_path.empty()) {
        json_text = read_file(spec_path);
      } else {
        m6::ChatSession session;
        session.system_prompt = m6::default_system_prompt();
        session.model_id = model;
        auto transport = m6::HttpTransport::from_env();
        const std::string reply = m6::request_structure(session, prompt, *transport);
        json_text = m6::strip_envelope(reply);
        if (!session_path.empty()) {
          write_file(session_path, m6::session_to_json(session));
        }
      }
      const m6::Composition composition = m6::parse_composition(json_text);
      if (output_path.empty()) output_path = composition.name + ".mid";
      return generate_from_composition(composition, config, seed, output_path);
    }

    if (edit->parsed()) {
      if (edit_prompt.empty() == revised_spec.empty()) {
        std::cerr << "error: pass exactly one of --prompt or --revised-spec\n";
        return kExitUsage;
      }
      m6::ChatSession session = m6::session_from_json(read_file(edit_session));
      if (session.turns.empty()) {
        std::cerr << "error: session has no previous composition\n";
        return kExitUsage;
      }
      const m6::Composition before =
          m6::parse_composition(m6::strip_envelope(session.turns.back().assistant));

      std::string revised_json;
      if (!revised_spec.empty()) {
        revised_json = read_file(revised_spec);
        session.turns.push_back({"(offline edit)", revised_json});
      } else {
        auto transport = m6::HttpTransport::from_env();
        revised_json = m6::strip_envelope(m6::request_structure(session, edit_prompt, *transport));
      }
      const m6::Composition after = m6::parse_composition(revised_json);

      const auto changed = changed_sections(before, after);
      std::cout << "changed sections:";
      if (changed.empty()) std::cout << " none";
      for (const auto& id : changed) std::cout << ' ' << id;
      std::cout << "\n";

      write_file(edit_session, m6::session_to_json(session));
      const m6::EngineConfig config = load_config_opt(edit_config);
      if (edit_output.empty()) edit_output = after.name + ".mid";
      // Track streams are keyed per section, so regenerating the whole song
      // reproduces unchanged sections note for note.
      return generate_from_composition(after, config, edit_seed, edit_output);
    }

    if (eval->parsed()) {
      const m6::EngineConfig config = load_config_opt(eval_config);
      m6::ScenarioReport report;
      if (scenario == "focused") {
        report = m6::run_scenario(m6::ScenarioKind::Focused, n_songs, eval_seed, config);
      } else if (scenario == "randomized") {
        report = m6::run_scenario(m6::ScenarioKind::Randomized, n_songs, eval_seed, config);
      } else if (scenario == "prompt_driven") {
        auto transport = m6::HttpTransport::from_env();
        static const char* kPrompts[] = {
            "an upbeat pop song about summer",      "a melancholic piano ballad",
            "an epic orchestral battle theme",      "a funky bass-driven groove",
            "a calm ambient piece in 7/8",          "a fast metal track in a minor key",
            "a jazzy lounge tune with rich chords", "a folk song with a memorable motif",
        };
        std::vector<m6::Composition> compositions;
        for (int i = 0; i < n_songs; ++i) {
          m6::ChatSession session;
          session.system_prompt = m6::default_system_prompt();
          session.model_id = model;
          const std::string reply =
              m6::request_structure(session, kPrompts[static_cast<size_t>(i) % 8], *transport);
          compositions.push_back(m6::parse_composition(m6::strip_envelope(reply)));
        }
        report = m6::evaluate_compositions("prompt_driven", compositions, eval_seed, config);
      } else {
        std::cerr << "error: unknown scenario '" << scenario << "'\n";
        return kExitUsage;
      }
      const std::string text = eval_format == "csv" ? report.to_csv() : report.to_json();
      if (eval_output.empty()) {
        std::cout << text << "\n";
      } else {
        write_file(eval_output, text);
        std::cout << "wrote " << eval_output << "\n";
      }
      return kExitOk;
    }
  } catch (const m6::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const m6::TransportError& e) {
    std::cerr << "llm error: " << e.what() << "\n";
    return kExitLlm;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
