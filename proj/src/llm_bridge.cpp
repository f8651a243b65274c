#include "m6/llm_bridge.h"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace m6 {

using nlohmann::json;

// ---------------------------------------------------------------------------
// System prompt (also shipped as data/system_prompt.txt)
// ---------------------------------------------------------------------------

const std::string& default_system_prompt() {
  static const std::string kPrompt = R"(You are a music composing system. The user will ask you about the song they want to generate and your task is to respond with output of JSON file and JSON file only, so it can be parsed directly. Do not add any commentary before or after the JSON.

The JSON document must follow this template:
{
  "schema_version": 1,
  "name": "<song name>",
  "sections": {
    "<section-id>": {
      "bpm": <20-300>,
      "time_signature": "<numerator>/<denominator>",
      "scale": {"root": "<note name>", "kind": "<scale kind>"},
      "chord_progression": ["<chord>", ...],
      "measures": <optional, defaults to the progression length>,
      "repeats": <positive integer>,
      "tracks": [{"role": "<role>", "instrument": <GM program number or name>, "mode": "<mode>"}, ...]
    }
  },
  "arrangement": [{"section": "<section-id>", "valence": <-1..1>, "arousal": <0..1>}, ...],
  "composer_note": "<short explanation of your artistic choices>"
}

Stick strictly to these sets and do not invent values outside them.
Scale kinds: major, natural_minor, harmonic_minor, melodic_minor, dorian, phrygian, lydian, mixolydian, locrian, major_pentatonic, minor_pentatonic, blues.
Chords: letter A-G with optional # or b, followed by one of: (nothing) major, m, dim, aug, maj7, m7, 7, sus2, sus4, maj9, m9. Every chord should belong to the section's scale. One chord plays per measure and the progression cycles.
Roles and their modes:
  melody: melody, solo
  bass: short_riff, long_riff, bassline, repetitive_bassline
  motif: long_motif, opening_motif, closing_motif, repeated_motif, short_repeated_motif
  chords: continuous, repeated, arpeggio
  drums: only_beat, drum_solo, standard (instrument must be one of the kits: standard, ethnic, orchestral)
Instruments for melodic roles are General MIDI programs, either the number 0-127 or the exact GM name.
Valence expresses pleasantness (-1 sad to 1 happy) and arousal expresses energy (0 calm to 1 intense) for each arrangement entry.

Keep the whole song coherent: instrumentation and style of consecutive sections should not vary too much from each other unless the user asks for contrast. When the user requests changes to an existing song, return the complete updated JSON document, not a fragment.)";
  return kPrompt;
}

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

HttpTransport::HttpTransport(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {}

std::unique_ptr<HttpTransport> HttpTransport::from_env() {
  const char* key = std::getenv("M6_LLM_API_KEY");
  if (key == nullptr || *key == '\0') {
    throw TransportError("M6_LLM_API_KEY is not set");
  }
  const char* base = std::getenv("M6_LLM_BASE_URL");
  return std::make_unique<HttpTransport>(base ? base : "https://api.openai.com", key);
}

std::string HttpTransport::post(const std::string& request_json) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  auto result = client.Post("/v1/chat/completions", headers, request_json, "application/json");
  if (!result) {
    throw TransportError("transport failure: " + httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw TransportError("HTTP " + std::to_string(result->status) + ": " + result->body);
  }
  return result->body;
}

// ---------------------------------------------------------------------------
// Conversation
// ---------------------------------------------------------------------------

std::string request_structure(ChatSession& session, const std::string& user_prompt,
                              Transport& transport) {
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", session.system_prompt}});
  for (const ChatTurn& turn : session.turns) {
    messages.push_back({{"role", "user"}, {"content", turn.user}});
    messages.push_back({{"role", "assistant"}, {"content", turn.assistant}});
  }
  messages.push_back({{"role", "user"}, {"content", user_prompt}});

  json request = {{"model", session.model_id},
                  {"temperature", session.temperature},
                  {"messages", std::move(messages)}};
  const std::string body = transport.post(request.dump());

  json response;
  try {
    response = json::parse(body);
  } catch (const json::parse_error&) {
    throw TransportError("non-JSON reply from provider: " + body);
  }
  if (!response.contains("choices") || response["choices"].empty() ||
      !response["choices"][0].contains("message")) {
    throw TransportError("unexpected reply shape: " + body);
  }
  std::string content = response["choices"][0]["message"].value("content", "");
  session.turns.push_back({user_prompt, content});
  return content;
}

std::string strip_envelope(const std::string& reply) {
  const size_t open = reply.find('{');
  if (open == std::string::npos) {
    throw TransportError("no JSON object found in reply");
  }
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (size_t i = open; i < reply.size(); ++i) {
    const char c = reply[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) return reply.substr(open, i - open + 1);
    }
  }
  throw TransportError("unbalanced JSON object in reply");
}

// ---------------------------------------------------------------------------
// Session persistence
// ---------------------------------------------------------------------------

std::string session_to_json(const ChatSession& session) {
  json doc;
  doc["system_prompt"] = session.system_prompt;
  doc["model_id"] = session.model_id;
  doc["temperature"] = session.temperature;
  json turns = json::array();
  for (const ChatTurn& turn : session.turns) {
    turns.push_back({{"user", turn.user}, {"assistant", turn.assistant}});
  }
  doc["turns"] = std::move(turns);
  return doc.dump(2);
}

ChatSession session_from_json(const std::string& json_text) {
  json doc = json::parse(json_text);
  ChatSession session;
  session.system_prompt = doc.value("system_prompt", default_system_prompt());
  session.model_id = doc.value("model_id", "gpt-4");
  session.temperature = doc.value("temperature", 0.0);
  for (const auto& turn : doc.value("turns", json::array())) {
    session.turns.push_back({turn.value("user", ""), turn.value("assistant", "")});
  }
  return session;
}

}  // namespace m6
