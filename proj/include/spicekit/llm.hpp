#pragma once

// Pluggable chat-completion clients: a generic HTTP JSON transport and a
// deterministic replay client that serves scripted responses from a JSONL
// fixture. Transport problems surface as TransportError, never as crashes.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "spicekit/spice.hpp"

namespace spicekit {

class LlmError : public SpiceError {
 public:
  using SpiceError::SpiceError;
};

class TransportError : public LlmError {
 public:
  using LlmError::LlmError;
};

class NoNetlistFound : public LlmError {
 public:
  using LlmError::LlmError;
};

enum class ChatRole { System, User, Assistant };

inline std::string chat_role_name(ChatRole r) {
  switch (r) {
    case ChatRole::System: return "system";
    case ChatRole::User: return "user";
    case ChatRole::Assistant: return "assistant";
  }
  return "?";
}

struct ChatMessage {
  ChatRole role = ChatRole::User;
  std::string content;  // nonempty; may embed an image reference

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

inline nlohmann::ordered_json messages_to_json(const std::vector<ChatMessage>& messages) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& m : messages)
    arr.push_back({{"role", chat_role_name(m.role)}, {"content", m.content}});
  return arr;
}

class LlmClient {
 public:
  virtual ~LlmClient() = default;

  // Returns one assistant completion for the ordered conversation.
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;

  virtual int calls() const = 0;
};

struct HttpClientConfig {
  std::string base_url = "http://localhost:8080";  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o";
  double temperature = 0.0;
  std::string api_key_env = "LLM_API_KEY";  // env var holding the bearer token
  int timeout_seconds = 30;
  int max_retries = 2;       // additional attempts after the first
  int backoff_initial_ms = 250;  // doubles per retry
};

class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(HttpClientConfig cfg) : cfg_(std::move(cfg)) {}

  std::string complete(const std::vector<ChatMessage>& messages) override {
    ++calls_;
    nlohmann::ordered_json body{{"model", cfg_.model},
                                {"messages", messages_to_json(messages)},
                                {"temperature", cfg_.temperature}};
    const std::string payload = body.dump();

    httplib::Client cli(cfg_.base_url);
    cli.set_connection_timeout(cfg_.timeout_seconds, 0);
    cli.set_read_timeout(cfg_.timeout_seconds, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    int backoff_ms = cfg_.backoff_initial_ms;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms *= 2;
      }
      auto res = cli.Post(cfg_.path, headers, payload, "application/json");
      if (!res) {
        last_error = "connection error: " + httplib::to_string(res.error());
        continue;  // retryable
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "server returned status " + std::to_string(res->status);
        continue;  // retryable
      }
      if (res->status != 200)
        throw TransportError("LLM endpoint returned status " + std::to_string(res->status) +
                             ": " + res->body);
      return parse_completion(res->body);
    }
    throw TransportError("LLM request failed after " + std::to_string(cfg_.max_retries + 1) +
                         " attempts; last error: " + last_error);
  }

  int calls() const override { return calls_; }

 private:
  static std::string parse_completion(const std::string& body) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("malformed completion response: ") + e.what());
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
      throw TransportError("completion response has no choices");
    const auto& msg = j["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string())
      throw TransportError("completion response has no message content");
    return msg["message"]["content"].get<std::string>();
  }

  HttpClientConfig cfg_;
  int calls_ = 0;
};

// Serves scripted assistant responses in order; exhausting the script is a
// transport error so harnesses fail loudly instead of looping forever.
class ReplayClient : public LlmClient {
 public:
  explicit ReplayClient(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}

  // JSONL fixture: each line is either a JSON string or an object with a
  // "content" (or "response") field.
  static ReplayClient from_jsonl(std::istream& in) {
    std::vector<std::string> responses;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::trim(line).empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw TransportError("replay fixture line " + std::to_string(line_no) +
                             " is not valid JSON: " + e.what());
      }
      if (j.is_string())
        responses.push_back(j.get<std::string>());
      else if (j.is_object() && j.contains("content") && j["content"].is_string())
        responses.push_back(j["content"].get<std::string>());
      else if (j.is_object() && j.contains("response") && j["response"].is_string())
        responses.push_back(j["response"].get<std::string>());
      else
        throw TransportError("replay fixture line " + std::to_string(line_no) +
                             " has no string content");
    }
    return ReplayClient(std::move(responses));
  }

  static ReplayClient from_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TransportError("cannot open replay fixture: " + path);
    return from_jsonl(in);
  }

  std::string complete(const std::vector<ChatMessage>&) override {
    if (next_ >= responses_.size())
      throw TransportError("replay fixture exhausted after " +
                           std::to_string(responses_.size()) + " responses");
    ++calls_;
    return responses_[next_++];
  }

  int calls() const override { return calls_; }
  std::size_t remaining() const { return responses_.size() - next_; }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
  int calls_ = 0;
};

}  // namespace spicekit
