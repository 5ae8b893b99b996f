#include <doctest.h>

#include "compass/batch.hpp"
#include "compass/event_log.hpp"
#include "compass/harvester.hpp"
#include "support.hpp"

using namespace compass;
using testsupport::FunctionProvider;
using testsupport::ScriptedProvider;

namespace {

std::vector<ArticleRecord> pool_of(int n) {
  std::vector<ArticleRecord> out;
  for (int i = 0; i < n; ++i) {
    ArticleRecord a;
    a.body_text = "article " + std::to_string(i);
    a.id = article_id_for(a.body_text);
    a.newspaper_id = "le-monde";
    a.char_length = a.body_text.size();
    out.push_back(a);
  }
  return out;
}

NewspaperSource paper() {
  NewspaperSource s;
  s.id = "le-monde";
  s.name = "Le Monde";
  return s;
}

ModelSpec spec() {
  ModelSpec s;
  s.id = "scripted";
  s.input_token_cost = Money::parse("0.001");
  return s;
}

struct Harness {
  SimulatedClock clock{testsupport::at(2024, 5, 9)};
  Gateway gateway{clock};
};

}  // namespace

TEST_CASE("twenty valid answers: the first A articles are used") {
  Harness h;
  h.gateway.set_model_provider("scripted", std::make_shared<FunctionProvider>([](std::string_view) { return "[1, 1]"; }));
  const auto pool = pool_of(20);
  const auto r = collect_daily_batch(h.gateway, h.clock, paper(), spec(), pool, 5);
  CHECK(r.status == BatchStatus::Complete);
  CHECK_FALSE(r.shortfall);
  REQUIRE(r.evaluations.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(r.evaluations[static_cast<std::size_t>(i)].article_id == pool[static_cast<std::size_t>(i)].id);
  CHECK(h.gateway.request_count() == 5);
  CHECK(r.evaluations[0].batch_day == parse_date("2024-05-09"));
}

TEST_CASE("one malformed answer is replaced from the pool") {
  Harness h;
  const auto pool = pool_of(20);
  const std::string bad = pool[2].body_text;
  h.gateway.set_model_provider("scripted", std::make_shared<FunctionProvider>([bad](std::string_view body) {
                                 return body == bad ? std::string("Sure! [3, -2]") : std::string("[3, -2]");
                               }));
  EventLog log(nullptr, h.clock, true);
  const auto r = collect_daily_batch(h.gateway, h.clock, paper(), spec(), pool, 5, {}, &log);
  CHECK(r.status == BatchStatus::Complete);
  REQUIRE(r.evaluations.size() == 5);
  CHECK(r.evaluations.back().article_id == pool[5].id);
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0].article_id == pool[2].id);
  CHECK(log.count("article_skipped") == 1);
}

TEST_CASE("a short pool reports the shortfall") {
  Harness h;
  const auto pool = pool_of(5);
  const std::string bad = pool[0].body_text;
  h.gateway.set_model_provider("scripted", std::make_shared<FunctionProvider>([bad](std::string_view body) {
                                 return body == bad ? std::string("[11, 0]") : std::string("[0, 0]");
                               }));
  const auto r = collect_daily_batch(h.gateway, h.clock, paper(), spec(), pool, 5);
  CHECK(r.status == BatchStatus::Incomplete);
  REQUIRE(r.shortfall);
  CHECK(r.shortfall->got() == 4);
  CHECK(r.shortfall->wanted() == 5);
  CHECK(r.evaluations.size() == 4);
}

TEST_CASE("wanting zero is trivially complete") {
  Harness h;
  const auto r = collect_daily_batch(h.gateway, h.clock, paper(), spec(), pool_of(3), 0);
  CHECK(r.status == BatchStatus::Complete);
  CHECK(r.evaluations.empty());
  CHECK(h.gateway.request_count() == 0);
}

TEST_CASE("malformed retries re-ask the same article") {
  Harness h;
  auto script = std::make_shared<ScriptedProvider>(std::vector<Attempt>{
      ScriptedProvider::ok("I think [1, 1]"), ScriptedProvider::ok("[1, 1]")});
  h.gateway.set_model_provider("scripted", script);
  BatchOptions opts;
  opts.malformed_retries = 1;
  const auto pool = pool_of(3);
  const auto r = collect_daily_batch(h.gateway, h.clock, paper(), spec(), pool, 1, opts);
  REQUIRE(r.evaluations.size() == 1);
  CHECK(r.evaluations[0].article_id == pool[0].id);
  CHECK(script->calls() == 2);
}

TEST_CASE("provider failures consume the article; quota propagates") {
  Harness h;
  auto failing = std::make_shared<ScriptedProvider>(std::vector<Attempt>{ScriptedProvider::status(500),
                                                                         ScriptedProvider::ok("[2, 2]")});
  h.gateway.set_model_provider("scripted", failing);
  BatchOptions opts;
  opts.retry_budget = 0;
  const auto pool = pool_of(3);
  const auto r = collect_daily_batch(h.gateway, h.clock, paper(), spec(), pool, 2, opts);
  REQUIRE(r.evaluations.size() == 2);
  CHECK(r.evaluations[0].article_id == pool[1].id);

  ModelSpec limited = spec();
  limited.daily_request_quota = 0;
  limited.quota_mode = QuotaMode::Fail;
  CHECK_THROWS_AS(collect_daily_batch(h.gateway, h.clock, paper(), limited, pool, 2, opts), QuotaExhausted);
}

TEST_CASE("batch cost sums per-evaluation costs") {
  Harness h;
  auto script = std::make_shared<ScriptedProvider>(std::vector{ScriptedProvider::ok("[0, 0]")});
  h.gateway.set_model_provider("scripted", script);
  const auto r = collect_daily_batch(h.gateway, h.clock, paper(), spec(), pool_of(4), 4);
  Money sum;
  for (const auto& e : r.evaluations) sum += e.cost;
  CHECK(r.cost == sum);
}
