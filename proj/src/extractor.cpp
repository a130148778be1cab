#include "histrec/extractor.hpp"

#include <fstream>

#include "histrec/errors.hpp"

namespace histrec::extract {

void ExtractorConfig::validate() const {
  if (max_retries < 1) throw ConfigError("max_retries must be >= 1");
  if (temperature < 0.0 || temperature > 2.0)
    throw ConfigError("temperature must be in [0,2]");
  if (model_name.empty()) throw ConfigError("model_name must not be empty");
}

std::vector<ChatMessage> build_messages(const std::string& person_info) {
  if (person_info.empty()) throw Error("person_info must not be empty");
  static const char* kSystem =
      "You are an advanced data extraction system.\n"
      "- You can identify each person by surname\n"
      "- The surname is always in uppercase letters, followed by the middle and/or first name\n"
      "- If you can't determine the field value, refer to the examples";
  return {{"system", kSystem},
          {"user", "Please extract the data for the following person: " + person_info}};
}

ExtractOutcome extract(const std::string& person_info, LlmClient& client,
                       const ExtractorConfig& cfg) {
  cfg.validate();
  const auto messages = build_messages(person_info);
  const json schema = records::person_record_schema();

  std::vector<std::string> attempt_errors;
  for (int attempt = 1; attempt <= cfg.max_retries; ++attempt) {
    json raw = client.send(messages, schema);
    auto result = records::validate(raw);
    if (auto* record = std::get_if<records::PersonRecord>(&result))
      return ExtractOutcome{std::move(*record), attempt};

    const auto& issues = std::get<std::vector<records::ValidationIssue>>(result);
    std::string summary = "attempt " + std::to_string(attempt) + ": ";
    for (std::size_t i = 0; i < issues.size(); ++i) {
      if (i > 0) summary += "; ";
      summary += issues[i].to_string();
    }
    attempt_errors.push_back(summary);
  }
  throw ExhaustedRetriesError(
      "no valid record after " + std::to_string(cfg.max_retries) + " attempts",
      std::move(attempt_errors));
}

// FNV-1a over the user content; stable across platforms, which keeps replay
// files portable.
std::string replay_digest(const std::string& user_content) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : user_content) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::unique_ptr<ReplayLlmClient> ReplayLlmClient::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open replay file " + path.string());
  json map;
  try {
    in >> map;
  } catch (const json::parse_error& e) {
    throw ConfigError("replay file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!map.is_object()) throw ConfigError("replay file " + path.string() + " must be a JSON map");
  return std::make_unique<ReplayLlmClient>(std::move(map));
}

ReplayLlmClient::ReplayLlmClient(json replay_map) : replay_(std::move(replay_map)) {}

json ReplayLlmClient::send(const std::vector<ChatMessage>& messages, const json& schema) {
  (void)schema;
  const ChatMessage* user = nullptr;
  for (const auto& m : messages)
    if (m.role == "user") user = &m;
  if (user == nullptr) throw TransportError("replay client: no user message to key on");

  const std::string digest = replay_digest(user->content);
  auto it = replay_.find(digest);
  if (it == replay_.end())
    throw TransportError("replay client: no entry for digest " + digest);

  if (!it->is_array()) return *it;
  if (it->empty()) throw TransportError("replay client: empty response list for " + digest);

  std::lock_guard<std::mutex> lock(mutex_);
  std::size_t n = call_counts_[digest]++;
  if (n >= it->size()) n = it->size() - 1;  // last response repeats
  return (*it)[n];
}

}  // namespace histrec::extract
