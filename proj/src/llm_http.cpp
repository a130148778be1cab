#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "histrec/errors.hpp"
#include "histrec/extractor.hpp"

namespace histrec::extract {

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // /v1/chat/completions
};

ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint_url must start with http:// or https://: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpLlmClient::HttpLlmClient(const ExtractorConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.endpoint_url.empty()) throw ConfigError("endpoint_url must be set for the http backend");
  parse_url(cfg_.endpoint_url);
}

json HttpLlmClient::request_body(const std::vector<ChatMessage>& messages,
                                 const json& schema) const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back(json{{"role", m.role}, {"content", m.content}});
  return json{{"model", cfg_.model_name},
              {"messages", msgs},
              {"temperature", cfg_.temperature},
              {"tools", json::array({json{{"type", "function"},
                                          {"function", json{{"name", "record_person"},
                                                            {"description",
                                                             "Record the extracted person data"},
                                                            {"parameters", schema}}}}})},
              {"tool_choice", "auto"}};
}

json HttpLlmClient::send(const std::vector<ChatMessage>& messages, const json& schema) {
  const ParsedUrl url = parse_url(cfg_.endpoint_url);
  httplib::Client client(url.base);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);

  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  const std::string body = request_body(messages, schema).dump();
  auto res = client.Post(url.path, headers, body, "application/json");
  if (!res)
    throw TransportError("request to " + cfg_.endpoint_url +
                         " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw TransportError("endpoint returned HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 512));

  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::parse_error&) {
    throw TransportError("endpoint reply is not valid JSON");
  }

  // choices[0].message.tool_calls[0].function.arguments carries the record.
  try {
    const json& call = reply.at("choices").at(0).at("message").at("tool_calls").at(0);
    const std::string arguments = call.at("function").at("arguments").get<std::string>();
    return json::parse(arguments);
  } catch (const json::exception&) {
    throw TransportError("endpoint reply carries no parseable tool call");
  }
}

}  // namespace histrec::extract
