#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <thread>

#include "compass/service.hpp"
#include "compass/text.hpp"
#include "support.hpp"

using namespace compass;
using nlohmann::json;
using testsupport::TempDir;

namespace {

struct Harness {
  TempDir dir;
  SimulatedClock clock{testsupport::at(2024, 5, 9)};
  Gateway gateway{clock};
  FixtureFetcher fetcher{testsupport::fixtures()};
  std::unique_ptr<ApiService> service;

  explicit Harness(std::string cors = "") {
    ServiceConfig cfg;
    cfg.models = default_model_specs();
    ModelSpec limited;
    limited.id = "limited";
    limited.daily_request_quota = 0;
    cfg.models.push_back(limited);
    cfg.runs_root = dir.path();
    cfg.cors_origin = std::move(cors);
    service = std::make_unique<ApiService>(cfg, fetcher, gateway, clock);
  }

  ApiReply evaluate(const std::string& path, const std::string& model = "mock-fixed") {
    return service->evaluate({{"url", "https://www.example-daily.test/" + path}, {"model_id", model}});
  }
};

std::string set_cookie(const ApiReply& r) {
  for (const auto& [k, v] : r.headers) {
    if (k == "Set-Cookie") return v;
  }
  return "";
}

}  // namespace

TEST_CASE("evaluate returns the score and persists it") {
  Harness h;
  const auto r = h.evaluate("article-1542");
  REQUIRE(r.status == 200);
  CHECK(r.body["score"]["economic"] == 0);
  CHECK(r.body["score"]["democracy"] == 0);
  CHECK(r.body["char_length"] == 1542);
  CHECK(r.body["cached"] == false);
  CHECK(r.body["model_id"] == "mock-fixed");
  CHECK(h.service->store().load_evaluations().size() == 1);
  CHECK(h.service->store().find_article(r.body["article_id"].get<std::string>()));
}

TEST_CASE("a repeat within the epoch is served from cache") {
  Harness h;
  REQUIRE(h.evaluate("article-1542").status == 200);
  const auto calls = h.gateway.request_count();
  const auto again = h.evaluate("article-1542");
  CHECK(again.status == 200);
  CHECK(again.body["cached"] == true);
  CHECK(h.gateway.request_count() == calls);
  h.clock.sleep_for(std::chrono::hours{24});
  CHECK(h.evaluate("article-1542").body["cached"] == false);
  CHECK(h.gateway.request_count() == calls + 1);
}

TEST_CASE("length and extraction failures are 422 with a reason") {
  Harness h;
  const auto shorty = h.evaluate("short-article");
  CHECK(shorty.status == 422);
  CHECK(shorty.body["reason"] == "below minimum length 1000");
  const auto listing = h.evaluate("category");
  CHECK(listing.status == 422);
  CHECK(listing.body["error"] == "extraction_empty");
  CHECK(h.gateway.request_count() == 0);
}

TEST_CASE("bad requests, missing pages and quotas") {
  Harness h;
  CHECK(h.service->evaluate({{"url", "not a url"}, {"model_id", "mock"}}).status == 400);
  CHECK(h.service->evaluate({{"model_id", "mock"}}).status == 400);
  CHECK(h.evaluate("article-1542", "nope").status == 400);
  CHECK(h.evaluate("missing").status == 502);
  const auto q = h.evaluate("article-1542", "limited");
  CHECK(q.status == 429);
  CHECK(q.body["error"] == "quota_exhausted");
}

TEST_CASE("assessments: stored, validated, session cookie issued once") {
  Harness h;
  const auto eval = h.evaluate("article-1542");
  const std::string id = eval.body["article_id"];
  const auto first = h.service->submit_assessment({{"article_id", id}, {"economic", 3}, {"democracy", -2}}, "");
  CHECK(first.status == 201);
  const auto cookie = set_cookie(first);
  REQUIRE(cookie.rfind(std::string(kSessionCookie) + "=", 0) == 0);
  CHECK(cookie.find("HttpOnly") != std::string::npos);
  const std::string token = cookie.substr(kSessionCookie.size() + 1, 32);

  const auto second = h.service->submit_assessment({{"article_id", id}, {"economic", -1}, {"democracy", 0}},
                                                   "other=1; " + std::string(kSessionCookie) + "=" + token);
  CHECK(second.status == 201);
  CHECK(set_cookie(second).empty());
  const auto rows = h.service->store().load_assessments();
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].score.economic() == -1);
  CHECK(rows[0].session_token == sha256_hex(token));
  CHECK(rows[0].session_token != token);

  CHECK(h.service->submit_assessment({{"article_id", id}, {"economic", 11}, {"democracy", 0}}, "").status == 400);
  CHECK(h.service->submit_assessment({{"article_id", id}, {"economic", 1}}, "").status == 400);
  CHECK(h.service->submit_assessment({{"article_id", "feedfacefeedface"}, {"economic", 1}, {"democracy", 1}}, "")
            .status == 404);
}

TEST_CASE("summary of known and unknown runs") {
  Harness h;
  REQUIRE(h.evaluate("article-1542").status == 200);
  const auto s = h.service->summary("live");
  CHECK(s.status == 200);
  CHECK(s.body["run_id"] == "live");
  CHECK(h.service->summary("nope").status == 404);
  CHECK(h.service->summary("").status == 400);
}

TEST_CASE("spec document lists every route") {
  Harness h;
  const auto doc = h.service->spec_document();
  for (const char* p : {"/api/evaluate", "/api/assessments", "/api/summary", "/api/spec"}) {
    CHECK(doc["paths"].contains(p));
  }
}

TEST_CASE("cookie parsing") {
  CHECK(cookie_value("a=1; compass_session=abc; b=2", "compass_session") == "abc");
  CHECK(cookie_value("compass_session_x=1", "compass_session") == std::nullopt);
  CHECK(cookie_value("", "compass_session") == std::nullopt);
}

TEST_CASE("over HTTP: headers, CORS and routes") {
  Harness h("https://app.example.test");
  httplib::Server server;
  h.service->mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  const auto r = client.Post("/api/evaluate",
                             json{{"url", "https://www.example-daily.test/article-1542"}, {"model_id", "mock-fixed"}}.dump(),
                             "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->get_header_value("X-Schema-Version") == "1");
  CHECK_FALSE(r->has_header("Access-Control-Allow-Origin"));
  CHECK(json::parse(r->body)["score"]["economic"] == 0);

  const auto bad = client.Post("/api/evaluate", "not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  const auto pre = client.Options("/api/evaluate", {{"Origin", "https://app.example.test"}});
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Origin") == "https://app.example.test");

  const auto foreign = client.Get("/api/spec", {{"Origin", "https://evil.example.test"}});
  REQUIRE(foreign);
  CHECK(foreign->status == 200);
  CHECK_FALSE(foreign->has_header("Access-Control-Allow-Origin"));

  const auto missing = client.Get("/api/summary?run=nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  th.join();
}
