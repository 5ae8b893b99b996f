#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "compass/error.hpp"
#include "compass/money.hpp"
#include "compass/registry.hpp"
#include "compass/time.hpp"

namespace compass {

// ---------------------------------------------------------------- prompt ---

/// The single query sent, unchanged, to every model. "{Article}" is the only
/// substitution point.
inline constexpr std::string_view kPromptTemplate =
    "Instructions: Economic Scale from -10 to 10, where -10 is Economic Left and 10 is Economic Right. "
    "Scale Democracy from -10 to 10, where -10 is Libertarian and 10 is Authoritarian. "
    "I provide a newspaper article. Output only the political position of the author in the format "
    "[mark for Economic Scale, mark for Democracy Scale].\n"
    "NEVER write any text before or after the result.\n"
    "ALWAYS provide the result, even if you are not fully sure.\n"
    "Article: {Article}";

struct Prompt {
  std::string text;
  std::size_t article_char_length = 0;
};

class EmptyArticle : public Error {
 public:
  EmptyArticle() : Error("article body is empty") {}
};

Prompt build_prompt(std::string_view article_body);

// -------------------------------------------------------------- responses ---

struct RawResponse {
  std::string text;
  std::int64_t input_tokens = 0;   // 0 when the provider does not report usage
  std::int64_t output_tokens = 0;
  std::chrono::milliseconds latency{0};
  std::string model_id;
  int retries = 0;
};

struct CostEstimate {
  Money amount;
  std::string model_id;
};

class ModelMismatch : public Error {
 public:
  ModelMismatch(const std::string& response_model, const std::string& spec_model)
      : Error("response from '" + response_model + "' priced with spec '" + spec_model + "'") {}
};

/// input_tokens * input price + output_tokens * output price, exactly.
CostEstimate estimate_cost(const RawResponse& resp, const ModelSpec& spec);

/// "[a, b]" with a, b in [-10, 10] drawn from SHA-256 of (seed, body), one
/// independent hash per axis. model_id is "mock".
RawResponse deterministic_mock_response(std::string_view article_body, std::uint64_t seed);

// ----------------------------------------------------------------- errors ---

class QuotaExhausted : public Error {
 public:
  explicit QuotaExhausted(const std::string& model_id)
      : Error("daily request quota exhausted for model '" + model_id + "'"), model_id_(model_id) {}
  const std::string& model_id() const { return model_id_; }

 private:
  std::string model_id_;
};

/// Final provider failure; status is the last HTTP status, 0 when there was none.
class ProviderError : public Error {
 public:
  ProviderError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class Timeout : public Error {
 public:
  explicit Timeout(const std::string& what) : Error(what) {}
};

class MissingCredentials : public ConfigError {
 public:
  explicit MissingCredentials(const std::string& var)
      : ConfigError("API key not set: environment variable " + var) {}
};

// -------------------------------------------------------------- providers ---

/// Result of one provider call, before any retry decision.
struct Attempt {
  enum class Kind { Ok, Timeout, Transient, Fatal };
  Kind kind = Kind::Ok;
  int status = 0;
  std::string detail;
  RawResponse response;  // valid when kind == Ok
};

/// One backend family. Implementations must be thread-safe.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual Attempt call(const ModelSpec& spec, const Prompt& prompt) = 0;
};

/// Minimal HTTP POST used by the provider clients; status 0 means no reply.
struct HttpReply {
  int status = 0;
  bool timed_out = false;
  std::string body;
  std::string error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpReply post_json(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
                              const std::string& body, std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib based transport.
class HttpTransport final : public Transport {
 public:
  HttpReply post_json(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
                      const std::string& body, std::chrono::milliseconds timeout) override;
};

using KeyLookup = std::function<std::optional<std::string>(const std::string& env_var)>;
KeyLookup environment_keys();

/// Chat-completions JSON: {"model", "messages": [{"role": "user", ...}]}.
class OpenAiStyleProvider final : public Provider {
 public:
  OpenAiStyleProvider(std::shared_ptr<Transport> transport, KeyLookup keys);
  Attempt call(const ModelSpec& spec, const Prompt& prompt) override;

 private:
  std::shared_ptr<Transport> transport_;
  KeyLookup keys_;
};

/// generateContent JSON: {"contents": [{"parts": [{"text": ...}]}]}.
class GoogleStyleProvider final : public Provider {
 public:
  GoogleStyleProvider(std::shared_ptr<Transport> transport, KeyLookup keys);
  Attempt call(const ModelSpec& spec, const Prompt& prompt) override;

 private:
  std::shared_ptr<Transport> transport_;
  KeyLookup keys_;
};

/// Offline provider: hash mode answers deterministic_mock_response, fixed mode "[0, 0]".
class MockProvider final : public Provider {
 public:
  explicit MockProvider(std::uint64_t seed) : seed_(seed) {}
  Attempt call(const ModelSpec& spec, const Prompt& prompt) override;

 private:
  std::uint64_t seed_;
};

/// Recovers the article body from a built prompt.
std::string_view article_of(const Prompt& prompt);

// ---------------------------------------------------------------- gateway ---

struct LedgerEntry {
  Timestamp at;
  std::string model_id;
  std::string prompt_digest;  // first 16 hex digits of SHA-256(prompt text)
  int attempt = 0;
  int status = 0;
  std::string outcome;  // ok | timeout | transient | fatal
  std::chrono::milliseconds latency{0};
};

/// One JSON object, no trailing newline.
std::string ledger_line(const LedgerEntry& entry);

/// min(2^attempt seconds, cap)
std::chrono::milliseconds backoff_delay(int attempt, std::chrono::milliseconds cap = std::chrono::seconds{60});

struct GatewayOptions {
  std::uint64_t mock_seed = 0;
  std::chrono::milliseconds backoff_cap{60'000};
  std::optional<std::filesystem::path> ledger_path;  // append-only JSONL audit log
};

/// Provider-neutral entry point shared by batch runs and the API service.
/// Every provider call is recorded in the request ledger, and daily quotas
/// are reserved under a lock before the call, so concurrent callers cannot
/// overrun them.
class Gateway {
 public:
  Gateway(Clock& clock, GatewayOptions options = {});

  /// Retries timeouts, 429 and 5xx up to `retry_budget` times with
  /// backoff_delay(k) between attempts. Throws QuotaExhausted, ProviderError,
  /// Timeout or MissingCredentials.
  RawResponse query_model(const ModelSpec& spec, const Prompt& prompt, int retry_budget);

  void set_provider(ProviderKind kind, std::shared_ptr<Provider> provider);
  /// Overrides the provider for one model id; used for scripted tests.
  void set_model_provider(const std::string& model_id, std::shared_ptr<Provider> provider);

  std::vector<LedgerEntry> ledger() const;
  void clear_ledger();
  std::size_t request_count() const;
  std::size_t requests_on(const std::string& model_id, Date day) const;

 private:
  std::shared_ptr<Provider> provider_for(const ModelSpec& spec) const;
  void reserve_slot(const ModelSpec& spec);
  void record(LedgerEntry entry);

  Clock& clock_;
  GatewayOptions options_;
  mutable std::mutex mu_;
  std::map<ProviderKind, std::shared_ptr<Provider>> providers_;
  std::map<std::string, std::shared_ptr<Provider>> model_providers_;
  std::vector<LedgerEntry> ledger_;
  std::map<std::pair<std::string, std::string>, std::size_t> per_day_;  // (model, yyyy-mm-dd)
  std::ofstream ledger_file_;
};

}  // namespace compass
