#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace m6 {

// Only the CLI talks to this module; the rest of the pipeline runs from file
// input and never sees it.

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChatTurn {
  std::string user;
  std::string assistant;
};

struct ChatSession {
  std::string system_prompt;
  std::vector<ChatTurn> turns;
  std::string model_id = "gpt-4";
  double temperature = 0.0;
};

// Chat-completion wire. The request body is provider JSON; the reply is the
// provider's raw response body.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string post(const std::string& request_json) = 0;
};

// HTTPS transport for an OpenAI-style /v1/chat/completions endpoint.
// Credentials come from M6_LLM_API_KEY only; the base URL can be overridden
// with M6_LLM_BASE_URL (useful for self-hosted gateways).
class HttpTransport : public Transport {
 public:
  HttpTransport(std::string base_url, std::string api_key);
  static std::unique_ptr<HttpTransport> from_env();

  std::string post(const std::string& request_json) override;

 private:
  std::string base_url_;
  std::string api_key_;
};

// Sends the session history plus one new user prompt and returns the
// assistant's raw text, appending the turn to the session. The caller feeds
// the result through strip_envelope and parse_composition.
std::string request_structure(ChatSession& session, const std::string& user_prompt,
                              Transport& transport);

// Cuts markdown fences and surrounding prose down to the outermost JSON
// object. Throws TransportError when no JSON object is present.
std::string strip_envelope(const std::string& reply);

// Session persistence for iterative editing.
std::string session_to_json(const ChatSession& session);
ChatSession session_from_json(const std::string& json_text);

// The instruction set sent as the system role. data/system_prompt.txt holds
// the same text as a standalone asset.
const std::string& default_system_prompt();

}  // namespace m6
