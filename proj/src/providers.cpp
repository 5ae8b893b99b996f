#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

#include "compass/gateway.hpp"
#include "compass/url.hpp"

namespace compass {
namespace {

using nlohmann::json;
using Headers = std::vector<std::pair<std::string, std::string>>;

Attempt classify_http(const HttpReply& reply) {
  Attempt a;
  a.status = reply.status;
  if (reply.timed_out) {
    a.kind = Attempt::Kind::Timeout;
    a.detail = "request timed out";
  } else if (reply.status == 0) {
    a.kind = Attempt::Kind::Transient;
    a.detail = "no reply: " + reply.error;
  } else if (reply.status == 429 || reply.status >= 500) {
    a.kind = Attempt::Kind::Transient;
    a.detail = "HTTP " + std::to_string(reply.status);
  } else if (reply.status < 200 || reply.status >= 300) {
    a.kind = Attempt::Kind::Fatal;
    a.detail = "HTTP " + std::to_string(reply.status);
  }
  return a;
}

std::int64_t token_count(const json& j, const char* object, const char* field) {
  if (!j.contains(object) || !j[object].is_object()) return 0;
  const auto& o = j[object];
  if (!o.contains(field) || !o[field].is_number_integer()) return 0;
  return std::max<std::int64_t>(0, o[field].get<std::int64_t>());
}

std::string require_key(const KeyLookup& keys, const ModelSpec& spec) {
  const std::string var = api_key_env_var(spec.id);
  auto key = keys(var);
  if (!key || key->empty()) throw MissingCredentials(var);
  return *key;
}

Attempt fatal(int status, std::string detail) {
  Attempt a;
  a.kind = Attempt::Kind::Fatal;
  a.status = status;
  a.detail = std::move(detail);
  return a;
}

}  // namespace

HttpReply HttpTransport::post_json(const std::string& url, const Headers& headers, const std::string& body,
                                   std::chrono::milliseconds timeout) {
  HttpReply out;
  const auto parsed = Url::parse(url);
  if (!parsed || !parsed->is_http()) {
    out.error = "invalid endpoint " + url;
    return out;
  }
  httplib::Client client(parsed->origin());
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(parsed->path_and_query(), h, body, "application/json");
  if (!res) {
    const auto err = res.error();
    out.timed_out = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout;
    out.error = httplib::to_string(err);
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

KeyLookup environment_keys() {
  return [](const std::string& var) -> std::optional<std::string> {
    if (const char* v = std::getenv(var.c_str())) return std::string(v);
    return std::nullopt;
  };
}

// ------------------------------------------------------------ openai-style ---

OpenAiStyleProvider::OpenAiStyleProvider(std::shared_ptr<Transport> transport, KeyLookup keys)
    : transport_(std::move(transport)), keys_(std::move(keys)) {}

Attempt OpenAiStyleProvider::call(const ModelSpec& spec, const Prompt& prompt) {
  const std::string key = require_key(keys_, spec);
  const json req = {{"model", spec.api_model.empty() ? spec.id : spec.api_model},
                    {"messages", json::array({{{"role", "user"}, {"content", prompt.text}}})}};
  const auto t0 = std::chrono::steady_clock::now();
  const HttpReply reply = transport_->post_json(spec.endpoint, {{"Authorization", "Bearer " + key}}, req.dump(),
                                                spec.request_timeout);
  const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  Attempt a = classify_http(reply);
  if (a.kind != Attempt::Kind::Ok) return a;
  const json j = json::parse(reply.body, nullptr, false);
  try {
    a.response.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    return fatal(reply.status, "unexpected chat-completion payload");
  }
  a.response.input_tokens = token_count(j, "usage", "prompt_tokens");
  a.response.output_tokens = token_count(j, "usage", "completion_tokens");
  a.response.latency = latency;
  a.response.model_id = spec.id;
  return a;
}

// ------------------------------------------------------------ google-style ---

GoogleStyleProvider::GoogleStyleProvider(std::shared_ptr<Transport> transport, KeyLookup keys)
    : transport_(std::move(transport)), keys_(std::move(keys)) {}

Attempt GoogleStyleProvider::call(const ModelSpec& spec, const Prompt& prompt) {
  const std::string key = require_key(keys_, spec);
  const json req = {
      {"contents", json::array({{{"role", "user"}, {"parts", json::array({{{"text", prompt.text}}})}}})}};
  const auto t0 = std::chrono::steady_clock::now();
  const HttpReply reply =
      transport_->post_json(spec.endpoint, {{"x-goog-api-key", key}}, req.dump(), spec.request_timeout);
  const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  Attempt a = classify_http(reply);
  if (a.kind != Attempt::Kind::Ok) return a;
  const json j = json::parse(reply.body, nullptr, false);
  try {
    a.response.text = j.at("candidates").at(0).at("content").at("parts").at(0).at("text").get<std::string>();
  } catch (const json::exception&) {
    return fatal(reply.status, "unexpected generateContent payload");
  }
  a.response.input_tokens = token_count(j, "usageMetadata", "promptTokenCount");
  a.response.output_tokens = token_count(j, "usageMetadata", "candidatesTokenCount");
  a.response.latency = latency;
  a.response.model_id = spec.id;
  return a;
}

// -------------------------------------------------------------------- mock ---

Attempt MockProvider::call(const ModelSpec& spec, const Prompt& prompt) {
  Attempt a;
  a.status = 200;
  if (spec.mock_mode == MockMode::Fixed) {
    a.response.text = "[0, 0]";
  } else {
    a.response = deterministic_mock_response(article_of(prompt), seed_);
  }
  a.response.model_id = spec.id;
  return a;
}

}  // namespace compass
