#pragma once

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compass/event_log.hpp"
#include "compass/fetch.hpp"
#include "compass/gateway.hpp"
#include "compass/registry.hpp"
#include "compass/store.hpp"

namespace httplib {
class Server;
}

namespace compass {

struct ServiceConfig {
  std::vector<ModelSpec> models;
  RunParameters params;
  std::filesystem::path runs_root = "runs";
  /// Run directory that receives evaluations and assessments made through the API.
  std::string store_run = "live";
  /// Only this origin gets CORS headers; empty disables CORS.
  std::string cors_origin;
  std::chrono::milliseconds cache_epoch{std::chrono::hours{24}};
  int retry_budget = 3;
};

/// Handler result, independent of the HTTP library.
struct ApiReply {
  int status = 200;
  nlohmann::json body;
  std::vector<std::pair<std::string, std::string>> headers;
};

inline constexpr std::string_view kSessionCookie = "compass_session";

/// Single-article evaluation, run summaries and anonymous assessments.
///
/// Evaluations are cached per (article content hash, model) within a cache
/// epoch, so repeating a request costs no provider call. Quotas are never
/// waited out inside a request: a quota-limited model answers 429.
class ApiService {
 public:
  ApiService(ServiceConfig config, Fetcher& fetcher, Gateway& gateway, Clock& clock, EventLog* log = nullptr);

  /// {"url", "model_id"} -> EvaluateResponse.
  ApiReply evaluate(const nlohmann::json& request);
  /// {"article_id", "economic", "democracy"}; `cookie_header` is the raw Cookie
  /// header, used to find an existing session.
  ApiReply submit_assessment(const nlohmann::json& request, const std::string& cookie_header);
  ApiReply summary(const std::string& run_id);
  nlohmann::json spec_document() const;

  /// Registers every route, plus schema-version and CORS headers.
  void mount(httplib::Server& server);

  RunStore& store() { return store_; }

 private:
  struct CacheEntry {
    nlohmann::json response;
    long long epoch;
  };
  long long epoch_now() const;

  ServiceConfig config_;
  Fetcher& fetcher_;
  Gateway& gateway_;
  Clock& clock_;
  EventLog* log_;
  RunStore store_;
  std::mutex cache_mu_;
  std::map<std::pair<std::string, std::string>, CacheEntry> cache_;
};

/// Value of one cookie in a Cookie header.
std::optional<std::string> cookie_value(const std::string& header, std::string_view name);

}  // namespace compass
