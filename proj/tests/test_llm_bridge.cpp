#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "m6/llm_bridge.h"

using namespace m6;

namespace {

// Canned provider responses.
class MockTransport : public Transport {
 public:
  explicit MockTransport(std::vector<std::string> replies) : replies_(std::move(replies)) {}

  std::string post(const std::string& request_json) override {
    requests.push_back(request_json);
    if (index_ >= replies_.size()) throw TransportError("mock exhausted");
    return replies_[index_++];
  }

  std::vector<std::string> requests;

 private:
  std::vector<std::string> replies_;
  size_t index_ = 0;
};

std::string completion(const std::string& content) {
  nlohmann::json doc;
  doc["choices"] = {{{"message", {{"role", "assistant"}, {"content", content}}}}};
  return doc.dump();
}

}  // namespace

TEST_SUITE("llm_bridge") {

TEST_CASE("mocked transport passes fixture text through") {
  MockTransport transport({completion("{\"a\":1}")});
  ChatSession session;
  session.system_prompt = default_system_prompt();
  const std::string reply = request_structure(session, "a calm piano ballad", transport);
  CHECK(reply == "{\"a\":1}");
  REQUIRE(session.turns.size() == 1);
  CHECK(session.turns[0].user == "a calm piano ballad");
  CHECK(session.turns[0].assistant == "{\"a\":1}");
}

TEST_CASE("follow-up turns accumulate and replay history") {
  MockTransport transport({completion("{\"v\":1}"), completion("{\"v\":2}")});
  ChatSession session;
  session.system_prompt = "sys";
  request_structure(session, "first", transport);
  request_structure(session, "make the chorus more energetic", transport);
  REQUIRE(session.turns.size() == 2);
  CHECK(session.turns[1].assistant == "{\"v\":2}");

  // The second request must replay the whole conversation.
  const auto body = nlohmann::json::parse(transport.requests[1]);
  REQUIRE(body["messages"].size() == 4);  // system, user, assistant, user
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][2]["content"] == "{\"v\":1}");
  CHECK(body["temperature"] == 0.0);
}

TEST_CASE("transport failure surfaces as TransportError") {
  class FailingTransport : public Transport {
    std::string post(const std::string&) override {
      throw TransportError("HTTP 503: upstream unavailable");
    }
  } transport;
  ChatSession session;
  CHECK_THROWS_WITH_AS(request_structure(session, "x", transport),
                       "HTTP 503: upstream unavailable", TransportError);
  CHECK(session.turns.empty());
}

TEST_CASE("non-JSON provider reply is surfaced verbatim") {
  MockTransport transport({"<html>gateway timeout</html>"});
  ChatSession session;
  try {
    request_structure(session, "x", transport);
    FAIL("expected TransportError");
  } catch (const TransportError& e) {
    CHECK(std::string(e.what()).find("gateway timeout") != std::string::npos);
  }
}

TEST_CASE("strip_envelope removes fences, prose, and leaves bare JSON alone") {
  CHECK(strip_envelope("```json\n{\"a\":1}\n```") == "{\"a\":1}");
  CHECK(strip_envelope("{\"a\":1}") == "{\"a\":1}");
  CHECK(strip_envelope("sorry, here it is: {\"a\":1}") == "{\"a\":1}");
  CHECK(strip_envelope("{\"a\":{\"b\":2},\"c\":\"}\"} trailing") ==
        "{\"a\":{\"b\":2},\"c\":\"}\"}");
  CHECK(strip_envelope("text {\"s\":\"brace \\\" } in string\"} end") ==
        "{\"s\":\"brace \\\" } in string\"}");
}

TEST_CASE("strip_envelope rejects replies without a JSON object") {
  CHECK_THROWS_AS(strip_envelope("no json here"), TransportError);
  CHECK_THROWS_AS(strip_envelope("{\"unbalanced\": true"), TransportError);
}

TEST_CASE("session replay with identical mocked replies is deterministic") {
  auto run = [] {
    MockTransport transport({completion("{\"v\":1}"), completion("{\"v\":2}")});
    ChatSession session;
    session.system_prompt = "sys";
    request_structure(session, "first", transport);
    request_structure(session, "second", transport);
    return session_to_json(session);
  };
  CHECK(run() == run());
}

TEST_CASE("sessions round-trip through JSON") {
  ChatSession session;
  session.system_prompt = "sys";
  session.model_id = "test-model";
  session.temperature = 0.0;
  session.turns = {{"u1", "{\"a\":1}"}, {"u2", "{\"a\":2}"}};
  const ChatSession loaded = session_from_json(session_to_json(session));
  CHECK(loaded.system_prompt == session.system_prompt);
  CHECK(loaded.model_id == session.model_id);
  REQUIRE(loaded.turns.size() == 2);
  CHECK(loaded.turns[1].assistant == "{\"a\":2}");
}

TEST_CASE("missing credentials raise a configuration error") {
#ifdef _WIN32
  return;
#else
  unsetenv("M6_LLM_API_KEY");
  CHECK_THROWS_AS(HttpTransport::from_env(), TransportError);
#endif
}

TEST_CASE("the shipped system prompt asset matches the built-in text") {
  std::ifstream in(std::string(M6_SOURCE_DIR) + "/data/system_prompt.txt");
  REQUIRE(in.good());
  std::string file_text((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  CHECK(file_text == default_system_prompt());
}

}  // TEST_SUITE
