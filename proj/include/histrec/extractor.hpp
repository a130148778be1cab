#pragma once

// Turns one person's OCR text into a schema-validated PersonRecord by
// prompting a chat-completion endpoint with the record schema attached as a
// function tool, retrying while the reply fails validation.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "histrec/records.hpp"

namespace histrec::extract {

using records::json;

struct ChatMessage {
  std::string role;  // "system" or "user"
  std::string content;
};

struct ExtractorConfig {
  std::string model_name = "gpt-3.5-turbo";
  double temperature = 0.7;
  int max_retries = 3;  // total attempts
  std::string endpoint_url;
  std::string api_key;

  void validate() const;  // throws ConfigError
};

// System message with the fixed extraction instructions plus a user message
// carrying the person text verbatim.
std::vector<ChatMessage> build_messages(const std::string& person_info);

class LlmClient {
 public:
  virtual ~LlmClient() = default;

  // Sends the messages with `schema` as the function-call parameter schema
  // and returns the tool-call arguments as a parsed JSON document.
  virtual json send(const std::vector<ChatMessage>& messages, const json& schema) = 0;
};

struct ExtractOutcome {
  records::PersonRecord record;
  int attempts = 0;
};

// Prompts, validates, retries up to cfg.max_retries attempts. Throws
// ExhaustedRetriesError with one message per failed attempt, or
// TransportError from the client.
ExtractOutcome extract(const std::string& person_info, LlmClient& client,
                       const ExtractorConfig& cfg);

// Stable digest of the user-message content; keys replay files.
std::string replay_digest(const std::string& user_content);

// Deterministic offline client: a JSON map from replay_digest(user content)
// to a response document, or to an array of documents consumed one per call
// (the last repeats). Safe for concurrent use.
class ReplayLlmClient : public LlmClient {
 public:
  static std::unique_ptr<ReplayLlmClient> from_file(const std::filesystem::path& path);
  explicit ReplayLlmClient(json replay_map);

  json send(const std::vector<ChatMessage>& messages, const json& schema) override;

 private:
  json replay_;
  std::map<std::string, std::size_t> call_counts_;
  std::mutex mutex_;
};

// Chat-completions HTTP backend. The endpoint URL names the full resource,
// e.g. "https://api.openai.com/v1/chat/completions"; the API key travels as
// a bearer token when present.
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(const ExtractorConfig& cfg);

  json send(const std::vector<ChatMessage>& messages, const json& schema) override;

  // Request body for one call; exposed for tests.
  json request_body(const std::vector<ChatMessage>& messages, const json& schema) const;

 private:
  ExtractorConfig cfg_;
};

}  // namespace histrec::extract
