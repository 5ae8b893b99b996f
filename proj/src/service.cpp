#include "compass/service.hpp"

#include <httplib.h>

#include "compass/harvester.hpp"
#include "compass/reporter.hpp"
#include "compass/text.hpp"

namespace compass {
using nlohmann::json;

namespace {

ApiReply error_reply(int status, const std::string& error, const std::string& reason) {
  return {status, {{"error", error}, {"reason", reason}}, {}};
}

std::optional<double> number_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) return std::nullopt;
  return j[key].get<double>();
}

std::string string_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) return {};
  return j[key].get<std::string>();
}

}  // namespace

std::optional<std::string> cookie_value(const std::string& header, std::string_view name) {
  std::size_t pos = 0;
  while (pos < header.size()) {
    auto end = header.find(';', pos);
    if (end == std::string::npos) end = header.size();
    const std::string part = trim(std::string_view(header).substr(pos, end - pos));
    const auto eq = part.find('=');
    if (eq != std::string::npos && std::string_view(part).substr(0, eq) == name) return part.substr(eq + 1);
    pos = end + 1;
  }
  return std::nullopt;
}

ApiService::ApiService(ServiceConfig config, Fetcher& fetcher, Gateway& gateway, Clock& clock, EventLog* log)
    : config_(std::move(config)),
      fetcher_(fetcher),
      gateway_(gateway),
      clock_(clock),
      log_(log),
      store_(RunStore::open(config_.runs_root, config_.store_run, true)) {
  config_.params.validate();
  if (config_.models.empty()) throw ConfigError("service needs at least one model");
}

long long ApiService::epoch_now() const {
  return clock_.now().time_since_epoch().count() / std::max<long long>(1, config_.cache_epoch.count());
}

ApiReply ApiService::evaluate(const json& request) {
  const std::string url_text = string_field(request, "url");
  const std::string model_id = string_field(request, "model_id");
  const auto url = Url::parse(trim(url_text));
  if (!url || !url->is_http()) return error_reply(400, "bad_request", "url must be an absolute http(s) URL");
  ModelSpec spec;
  try {
    spec = resolve_model(model_id, config_.models);
  } catch (const Error& e) {
    return error_reply(400, "bad_request", e.what());
  }
  // A request must never sit out a quota window.
  spec.quota_mode = QuotaMode::Fail;

  ArticleRecord article;
  try {
    article = extract_article(fetcher_, normalize(*url), "web", clock_);
  } catch (const ExtractionEmpty& e) {
    return error_reply(422, "extraction_empty", e.what());
  } catch (const NotHtml& e) {
    return error_reply(422, "not_html", e.what());
  } catch (const FetchError& e) {
    return error_reply(502, "fetch_failed", e.what());
  }
  const auto len = static_cast<long long>(article.char_length);
  if (len < config_.params.min_chars) {
    return error_reply(422, "too_short", "below minimum length " + std::to_string(config_.params.min_chars));
  }
  if (len > config_.params.max_chars) {
    return error_reply(422, "too_long", "above maximum length " + std::to_string(config_.params.max_chars));
  }

  const auto key = std::make_pair(article.id, spec.id);
  const long long epoch = epoch_now();
  {
    std::lock_guard lock(cache_mu_);
    if (auto it = cache_.find(key); it != cache_.end() && it->second.epoch == epoch) {
      json body = it->second.response;
      body["cached"] = true;
      return {200, body, {}};
    }
  }

  Evaluation e;
  try {
    RawResponse resp = gateway_.query_model(spec, build_prompt(article.body_text), config_.retry_budget);
    e.score = parse_score(resp.text);
    e.cost = estimate_cost(resp, spec).amount;
    e.raw_text = std::move(resp.text);
    e.input_tokens = resp.input_tokens;
    e.output_tokens = resp.output_tokens;
  } catch (const QuotaExhausted& ex) {
    return error_reply(429, "quota_exhausted", ex.what());
  } catch (const FormatError& ex) {
    return error_reply(502, "malformed_model_output", ex.what());
  } catch (const RangeError& ex) {
    return error_reply(502, "malformed_model_output", ex.what());
  } catch (const ProviderError& ex) {
    return error_reply(502, "provider_error", ex.what());
  } catch (const Timeout& ex) {
    return error_reply(502, "provider_timeout", ex.what());
  } catch (const MissingCredentials& ex) {
    return error_reply(502, "provider_unconfigured", ex.what());
  }
  e.article_id = article.id;
  e.newspaper_id = article.newspaper_id;
  e.model_id = spec.id;
  e.evaluated_at = clock_.now();
  e.batch_day = utc_date(e.evaluated_at);

  store_.append_articles(std::span<const ArticleRecord>(&article, 1));
  if (!store_.has_evaluation(e.article_id, e.model_id, e.batch_day)) {
    store_.append_evaluations(std::span<const Evaluation>(&e, 1));
  }

  json body = {{"article_id", article.id},
               {"title", article.title ? json(*article.title) : json(nullptr)},
               {"char_length", article.char_length},
               {"score", {{"economic", e.score.economic()}, {"democracy", e.score.democracy()}}},
               {"model_id", spec.id},
               {"cached", false}};
  {
    std::lock_guard lock(cache_mu_);
    cache_[key] = {body, epoch};
  }
  if (log_) log_->emit("api_evaluate", {{"article_id", article.id}, {"model_id", spec.id}});
  return {200, body, {}};
}

ApiReply ApiService::submit_assessment(const json& request, const std::string& cookie_header) {
  const std::string article_id = string_field(request, "article_id");
  const auto economic = number_field(request, "economic");
  const auto democracy = number_field(request, "democracy");
  if (article_id.empty() || !economic || !democracy) {
    return error_reply(400, "bad_request", "article_id, economic and democracy are required");
  }
  HumanAssessment a;
  try {
    a.score = CompassScore(*economic, *democracy);
  } catch (const RangeError& e) {
    return error_reply(400, "out_of_range", e.what());
  }
  ApiReply reply{201, json::object(), {}};
  auto token = cookie_value(cookie_header, kSessionCookie);
  if (!token || token->size() != 32 || token->find_first_not_of("0123456789abcdef") != std::string::npos) {
    token = random_token_hex();
    reply.headers.emplace_back("Set-Cookie", std::string(kSessionCookie) + "=" + *token +
                                                 "; Path=/api; HttpOnly; SameSite=Strict; Max-Age=31536000");
  }
  a.article_id = article_id;
  a.submitted_at = clock_.now();
  a.session_token = sha256_hex(*token);
  try {
    store_.record_assessment(a);
  } catch (const UnknownArticle& e) {
    return error_reply(404, "unknown_article", e.what());
  }
  reply.body = {{"article_id", a.article_id},
                {"score", {{"economic", a.score.economic()}, {"democracy", a.score.democracy()}}},
                {"submitted_at", format_timestamp(a.submitted_at)}};
  return reply;
}

ApiReply ApiService::summary(const std::string& run_id) {
  if (run_id.empty()) return error_reply(400, "bad_request", "query parameter 'run' is required");
  try {
    const RunStore run = RunStore::open(config_.runs_root, run_id);
    return {200, bundle_json(build_bundle(run)), {}};
  } catch (const UnknownRun& e) {
    return error_reply(404, "unknown_run", e.what());
  }
}

json ApiService::spec_document() const {
  const json error_schema = {{"type", "object"},
                             {"properties", {{"error", {{"type", "string"}}}, {"reason", {{"type", "string"}}}}}};
  const json score_schema = {
      {"type", "object"},
      {"required", {"economic", "democracy"}},
      {"properties",
       {{"economic", {{"type", "number"}, {"minimum", -10}, {"maximum", 10}}},
        {"democracy", {{"type", "number"}, {"minimum", -10}, {"maximum", 10}}}}}};
  json models = json::array();
  for (const auto& m : config_.models) models.push_back(m.id);
  return {
      {"openapi", "3.0.3"},
      {"info", {{"title", "compass-audit API"}, {"version", "1"}}},
      {"x-schema-version", kSchemaVersion},
      {"x-models", models},
      {"x-length-bounds", {{"min_chars", config_.params.min_chars}, {"max_chars", config_.params.max_chars}}},
      {"components", {{"schemas", {{"Error", error_schema}, {"Score", score_schema}}}}},
      {"paths",
       {{"/api/evaluate",
         {{"post",
           {{"summary", "Evaluate one article with one model"},
            {"requestBody",
             {{"content",
               {{"application/json",
                 {{"schema",
                   {{"type", "object"},
                    {"required", {"url", "model_id"}},
                    {"properties", {{"url", {{"type", "string"}}}, {"model_id", {{"type", "string"}}}}}}}}}}}}},
            {"responses",
             {{"200", {{"description", "article_id, title, char_length, score, model_id, cached"}}},
              {"400", {{"description", "bad URL or unknown model"}}},
              {"422", {{"description", "article too short, too long, or not extractable"}}},
              {"429", {{"description", "model quota exhausted"}}},
              {"502", {{"description", "provider or fetch failure"}}}}}}}}},
        {"/api/assessments",
         {{"post",
           {{"summary", "Submit an anonymous assessment"},
            {"requestBody",
             {{"content",
               {{"application/json",
                 {{"schema",
                   {{"type", "object"},
                    {"required", {"article_id", "economic", "democracy"}},
                    {"properties",
                     {{"article_id", {{"type", "string"}}},
                      {"economic", {{"type", "number"}, {"minimum", -10}, {"maximum", 10}}},
                      {"democracy", {{"type", "number"}, {"minimum", -10}, {"maximum", 10}}}}}}}}}}}}},
            {"responses",
             {{"201", {{"description", "stored"}}},
              {"400", {{"description", "score out of range"}}},
              {"404", {{"description", "unknown article"}}}}}}}}},
        {"/api/summary",
         {{"get",
           {{"summary", "Plot-ready datasets for a run"},
            {"parameters", json::array({{{"name", "run"}, {"in", "query"}, {"required", true}}})},
            {"responses", {{"200", {{"description", "report bundle"}}}, {"404", {{"description", "unknown run"}}}}}}}}},
        {"/api/spec", {{"get", {{"summary", "This document"}, {"responses", {{"200", {{"description", "ok"}}}}}}}}}}}};
}

void ApiService::mount(httplib::Server& server) {
  const auto send = [](httplib::Response& res, const ApiReply& r) {
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body.dump(), "application/json");
  };
  const auto parse_body = [](const httplib::Request& req) { return json::parse(req.body, nullptr, false); };

  server.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    res.set_header("X-Schema-Version", std::to_string(kSchemaVersion));
    const std::string origin = req.get_header_value("Origin");
    if (!config_.cors_origin.empty() && origin == config_.cors_origin) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Credentials", "true");
      res.set_header("Vary", "Origin");
      if (req.method == "OPTIONS") {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
        return httplib::Server::HandlerResponse::Handled;
      }
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  server.Post("/api/evaluate", [this, send, parse_body](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    if (!body.is_object()) return send(res, error_reply(400, "bad_request", "body must be a JSON object"));
    send(res, evaluate(body));
  });
  server.Post("/api/assessments", [this, send, parse_body](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    if (!body.is_object()) return send(res, error_reply(400, "bad_request", "body must be a JSON object"));
    send(res, submit_assessment(body, req.get_header_value("Cookie")));
  });
  server.Get("/api/summary", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, summary(req.has_param("run") ? req.get_param_value("run") : std::string()));
  });
  server.Get("/api/spec", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, {200, spec_document(), {}});
  });
  server.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, error_reply(500, "internal", what));
  });
}

}  // namespace compass
