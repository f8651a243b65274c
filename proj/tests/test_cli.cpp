// End-to-end tests of the m6 binary: spec/prompt generation equivalence, the
// offline edit flow, and error exit codes.

#include <doctest.h>

#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#else
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#endif

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "m6/llm_bridge.h"
#include "midi_reader.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = M6_CLI_PATH;
const std::string kFixture = std::string(M6_SOURCE_DIR) + "/tests/fixtures/ballad.json";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("m6_cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string command = env + " " + kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<uint8_t> read_bytes(const std::string& path) {
  const std::string text = read_text(path);
  return std::vector<uint8_t>(text.begin(), text.end());
}

// (track name, tick, pitch) triples for all notes, ignoring tempo metas.
std::vector<std::tuple<std::string, long, int>> note_triples(const std::string& path) {
  const auto parsed = midi_reader::parse(read_bytes(path));
  std::vector<std::tuple<std::string, long, int>> out;
  for (size_t t = 0; t < parsed.tracks.size(); ++t) {
    const std::string name = t < parsed.track_names.size() ? parsed.track_names[t] : "";
    for (const auto& note : parsed.tracks[t]) {
      out.emplace_back(name, note.tick, note.pitch);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate is deterministic and exits cleanly") {
  TempDir dir;
  REQUIRE(run_cli("generate --spec '" + kFixture + "' --seed 9 -o " + dir.file("a.mid")) == 0);
  REQUIRE(run_cli("generate --spec '" + kFixture + "' --seed 9 -o " + dir.file("b.mid")) == 0);
  CHECK(read_bytes(dir.file("a.mid")) == read_bytes(dir.file("b.mid")));
  CHECK(fs::exists(dir.file("a.report.json")));
  CHECK(fs::exists(dir.file("a.fitness.csv")));
}

TEST_CASE("different seeds give different music") {
  TempDir dir;
  REQUIRE(run_cli("generate --spec '" + kFixture + "' --seed 1 -o " + dir.file("a.mid")) == 0);
  REQUIRE(run_cli("generate --spec '" + kFixture + "' --seed 2 -o " + dir.file("b.mid")) == 0);
  CHECK(read_bytes(dir.file("a.mid")) != read_bytes(dir.file("b.mid")));
}

TEST_CASE("missing spec file exits with the IO code") {
  CHECK(run_cli("generate --spec /no/such/file.json -o out.mid") == 4);
}

TEST_CASE("invalid spec exits with the schema code") {
  TempDir dir;
  std::ofstream(dir.file("bad.json")) << "{\"schema_version\": 1}";
  CHECK(run_cli("generate --spec " + dir.file("bad.json") + " -o out.mid") == 2);
}

TEST_CASE("generate wants exactly one input source") {
  CHECK(run_cli("generate") == 1);
  CHECK(run_cli("generate --spec a.json --prompt b") == 1);
}

TEST_CASE("prompt path through a mock provider equals the spec path") {
  const std::string spec_text = read_text(kFixture);

  httplib::Server server;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request&, httplib::Response& res) {
                json reply;
                reply["choices"] = {
                    {{"message",
                      {{"role", "assistant"},
                       {"content", "Here is your song:\n```json\n" + spec_text + "\n```"}}}}};
                res.set_content(reply.dump(), "application/json");
              });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread listener([&server] { server.listen_after_bind(); });
  server.wait_until_ready();

  TempDir dir;
  const std::string env = "M6_LLM_API_KEY=test-key M6_LLM_BASE_URL=http://127.0.0.1:" +
                          std::to_string(port);
  const int exit_code =
      run_cli("generate --prompt 'a calm piano ballad' --seed 42 -o " + dir.file("p.mid") +
                  " --session " + dir.file("session.json"),
              env);
  server.stop();
  listener.join();
  REQUIRE(exit_code == 0);

  REQUIRE(run_cli("generate --spec '" + kFixture + "' --seed 42 -o " + dir.file("s.mid")) == 0);
  CHECK(read_bytes(dir.file("p.mid")) == read_bytes(dir.file("s.mid")));

  // the session now carries one turn with the raw reply
  const auto session = m6::session_from_json(read_text(dir.file("session.json")));
  REQUIRE(session.turns.size() == 1);
  CHECK(session.turns[0].user == "a calm piano ballad");
}

TEST_CASE("prompt without credentials exits with the llm code") {
  CHECK(run_cli("generate --prompt 'anything' -o out.mid", "M6_LLM_API_KEY=") == 3);
}

TEST_CASE("edit without a session file is a usage error") {
  CHECK(run_cli("edit --prompt x") == 1);     // --session required
  CHECK(run_cli("edit --session /no/such/session.json --revised-spec x.json") == 4);
}

TEST_CASE("edit needs exactly one of prompt or revised spec") {
  TempDir dir;
  std::ofstream(dir.file("session.json")) << "{\"turns\": []}";
  CHECK(run_cli("edit --session " + dir.file("session.json")) == 1);
}

TEST_CASE("offline edit regenerates deterministically") {
  TempDir dir;
  const std::string spec_text = read_text(kFixture);

  // a session whose last assistant message is the current composition
  m6::ChatSession session;
  session.system_prompt = m6::default_system_prompt();
  session.turns.push_back({"make me a ballad", spec_text});
  std::ofstream(dir.file("session.json")) << m6::session_to_json(session);

  REQUIRE(run_cli("generate --spec '" + kFixture + "' --seed 42 -o " + dir.file("base.mid")) ==
          0);

  SUBCASE("no structural change gives byte-identical MIDI") {
    std::ofstream(dir.file("same.json")) << spec_text;
    REQUIRE(run_cli("edit --session " + dir.file("session.json") + " --revised-spec " +
                    dir.file("same.json") + " --seed 42 -o " + dir.file("edited.mid")) == 0);
    CHECK(read_bytes(dir.file("edited.mid")) == read_bytes(dir.file("base.mid")));
  }

  SUBCASE("a bpm-only change keeps every note identical") {
    json revised = json::parse(spec_text);
    revised["sections"]["verse"]["bpm"] = 126;
    std::ofstream(dir.file("bpm.json")) << revised.dump();
    REQUIRE(run_cli("edit --session " + dir.file("session.json") + " --revised-spec " +
                    dir.file("bpm.json") + " --seed 42 -o " + dir.file("edited.mid")) == 0);
    CHECK(read_bytes(dir.file("edited.mid")) != read_bytes(dir.file("base.mid")));
    CHECK(note_triples(dir.file("edited.mid")) == note_triples(dir.file("base.mid")));
  }

  SUBCASE("changing one section leaves the other sections' notes alone") {
    json revised = json::parse(spec_text);
    revised["sections"]["chorus"]["chord_progression"] = {"F", "G", "Am", "C"};
    std::ofstream(dir.file("chorus.json")) << revised.dump();
    REQUIRE(run_cli("edit --session " + dir.file("session.json") + " --revised-spec " +
                    dir.file("chorus.json") + " --seed 42 -o " + dir.file("edited.mid")) == 0);

    auto pick = [](const std::vector<std::tuple<std::string, long, int>>& notes,
                   const std::string& prefix, bool match) {
      std::vector<std::tuple<std::string, long, int>> out;
      for (const auto& note : notes) {
        if ((std::get<0>(note).rfind(prefix, 0) == 0) == match) out.push_back(note);
      }
      return out;
    };
    const auto base = note_triples(dir.file("base.mid"));
    const auto edited = note_triples(dir.file("edited.mid"));
    CHECK(pick(base, "verse", true) == pick(edited, "verse", true));
    CHECK(pick(base, "chorus", true) != pick(edited, "chorus", true));
  }
}

TEST_CASE("eval rejects unknown scenarios and missing credentials") {
  CHECK(run_cli("eval --scenario nonsense") == 1);
  CHECK(run_cli("eval --scenario prompt_driven --n 1", "M6_LLM_API_KEY=") == 3);
}

TEST_CASE("eval writes a focused report") {
  TempDir dir;
  const std::string config = dir.file("config.json");
  std::ofstream(config) << R"({"ga": {"population_size": 16, "generations": 2}})";
  REQUIRE(run_cli("eval --scenario focused --n 2 --seed 3 --config " + config + " -o " +
                  dir.file("report.json")) == 0);
  const json report = json::parse(read_text(dir.file("report.json")));
  CHECK(report["n_songs"] == 2);
  CHECK(report.contains("scale_consistency_percent"));

  REQUIRE(run_cli("eval --scenario focused --n 2 --seed 3 --config " + config +
                  " --format csv -o " + dir.file("report.csv")) == 0);
  CHECK(read_text(dir.file("report.csv")).find("groove_consistency_percent") !=
        std::string::npos);
}

}  // TEST_SUITE
