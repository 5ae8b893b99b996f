#include "compass/gateway.hpp"

#include <json.hpp>

#include <algorithm>

#include "compass/text.hpp"

namespace compass {
namespace {

constexpr std::string_view kPlaceholder = "{Article}";

int hashed_axis_value(std::string_view axis, std::uint64_t seed, std::string_view body) {
  std::string material;
  material.reserve(body.size() + 32);
  material.append(axis).append("|").append(std::to_string(seed)).append("|").append(body);
  return static_cast<int>(sha256_u64(material) % 21) - 10;
}

std::string_view outcome_name(Attempt::Kind k) {
  switch (k) {
    case Attempt::Kind::Ok: return "ok";
    case Attempt::Kind::Timeout: return "timeout";
    case Attempt::Kind::Transient: return "transient";
    case Attempt::Kind::Fatal: return "fatal";
  }
  return "fatal";
}

}  // namespace

Prompt build_prompt(std::string_view article_body) {
  if (article_body.empty()) throw EmptyArticle();
  const auto at = kPromptTemplate.find(kPlaceholder);
  Prompt p;
  p.text.reserve(kPromptTemplate.size() + article_body.size());
  p.text.append(kPromptTemplate.substr(0, at));
  p.text.append(article_body);
  p.text.append(kPromptTemplate.substr(at + kPlaceholder.size()));
  p.article_char_length = utf8_length(article_body);
  return p;
}

std::string_view article_of(const Prompt& prompt) {
  const auto at = kPromptTemplate.find(kPlaceholder);
  const std::size_t tail = kPromptTemplate.size() - at - kPlaceholder.size();
  std::string_view t = prompt.text;
  if (t.size() < at + tail) return {};
  return t.substr(at, t.size() - at - tail);
}

CostEstimate estimate_cost(const RawResponse& resp, const ModelSpec& spec) {
  if (resp.model_id != spec.id) throw ModelMismatch(resp.model_id, spec.id);
  return {spec.input_token_cost * resp.input_tokens + spec.output_token_cost * resp.output_tokens, spec.id};
}

RawResponse deterministic_mock_response(std::string_view article_body, std::uint64_t seed) {
  const int a = hashed_axis_value("economic", seed, article_body);
  const int b = hashed_axis_value("democracy", seed, article_body);
  RawResponse r;
  r.text = "[" + std::to_string(a) + ", " + std::to_string(b) + "]";
  r.model_id = "mock";
  return r;
}

std::chrono::milliseconds backoff_delay(int attempt, std::chrono::milliseconds cap) {
  if (attempt < 0) attempt = 0;
  if (attempt >= 30) return cap;
  return std::min(std::chrono::milliseconds{1000LL << attempt}, cap);
}

std::string ledger_line(const LedgerEntry& e) {
  nlohmann::json j = {{"schema", 1},
                      {"at", format_timestamp(e.at)},
                      {"model_id", e.model_id},
                      {"prompt_digest", e.prompt_digest},
                      {"attempt", e.attempt},
                      {"status", e.status},
                      {"outcome", e.outcome},
                      {"latency_ms", e.latency.count()}};
  return j.dump();
}

// ---------------------------------------------------------------- gateway ---

Gateway::Gateway(Clock& clock, GatewayOptions options) : clock_(clock), options_(std::move(options)) {
  providers_[ProviderKind::Mock] = std::make_shared<MockProvider>(options_.mock_seed);
  auto transport = std::make_shared<HttpTransport>();
  providers_[ProviderKind::OpenAiStyle] = std::make_shared<OpenAiStyleProvider>(transport, environment_keys());
  providers_[ProviderKind::GoogleStyle] = std::make_shared<GoogleStyleProvider>(transport, environment_keys());
}

void Gateway::set_provider(ProviderKind kind, std::shared_ptr<Provider> provider) {
  std::lock_guard lock(mu_);
  providers_[kind] = std::move(provider);
}

void Gateway::set_model_provider(const std::string& model_id, std::shared_ptr<Provider> provider) {
  std::lock_guard lock(mu_);
  model_providers_[model_id] = std::move(provider);
}

std::shared_ptr<Provider> Gateway::provider_for(const ModelSpec& spec) const {
  std::lock_guard lock(mu_);
  if (auto it = model_providers_.find(spec.id); it != model_providers_.end()) return it->second;
  return providers_.at(spec.provider);
}

void Gateway::reserve_slot(const ModelSpec& spec) {
  for (;;) {
    Date day;
    {
      std::lock_guard lock(mu_);
      day = utc_date(clock_.now());
      auto& used = per_day_[{spec.id, format_date(day)}];
      if (!spec.daily_request_quota || used < static_cast<std::size_t>(*spec.daily_request_quota)) {
        ++used;
        return;
      }
      if (spec.quota_mode == QuotaMode::Fail) throw QuotaExhausted(spec.id);
    }
    // Wait for the next UTC day's window, then try again.
    clock_.sleep_until(start_of_day(Date{std::chrono::sys_days{day} + std::chrono::days{1}}));
  }
}

void Gateway::record(LedgerEntry entry) {
  std::lock_guard lock(mu_);
  // Opened on first use: the run directory may not exist when the gateway is built.
  if (options_.ledger_path && !ledger_file_.is_open()) {
    ledger_file_.open(*options_.ledger_path, std::ios::app | std::ios::binary);
    if (!ledger_file_) throw StorageError("cannot open request ledger " + options_.ledger_path->string());
  }
  if (ledger_file_.is_open()) {
    ledger_file_ << ledger_line(entry) << '\n';
    ledger_file_.flush();
  }
  ledger_.push_back(std::move(entry));
}

RawResponse Gateway::query_model(const ModelSpec& spec, const Prompt& prompt, int retry_budget) {
  auto provider = provider_for(spec);
  const std::string digest = sha256_hex(prompt.text).substr(0, 16);
  Attempt last;
  for (int k = 0;; ++k) {
    reserve_slot(spec);
    last = provider->call(spec, prompt);
    record({clock_.now(), spec.id, digest, k, last.status, std::string(outcome_name(last.kind)), last.response.latency});
    if (last.kind == Attempt::Kind::Ok) {
      last.response.model_id = spec.id;
      last.response.retries = k;
      return last.response;
    }
    if (last.kind == Attempt::Kind::Fatal || k >= retry_budget) break;
    clock_.sleep_for(backoff_delay(k, options_.backoff_cap));
  }
  const std::string what = spec.id + ": " + last.detail;
  if (last.kind == Attempt::Kind::Timeout) throw Timeout(what);
  throw ProviderError(last.status, what);
}

std::vector<LedgerEntry> Gateway::ledger() const {
  std::lock_guard lock(mu_);
  return ledger_;
}

void Gateway::clear_ledger() {
  std::lock_guard lock(mu_);
  ledger_.clear();
}

std::size_t Gateway::request_count() const {
  std::lock_guard lock(mu_);
  return ledger_.size();
}

std::size_t Gateway::requests_on(const std::string& model_id, Date day) const {
  std::lock_guard lock(mu_);
  auto it = per_day_.find({model_id, format_date(day)});
  return it == per_day_.end() ? 0 : it->second;
}

}  // namespace compass
