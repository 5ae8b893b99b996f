#include <doctest.h>

#include "compass/event_log.hpp"
#include "compass/pipeline.hpp"
#include "compass/synthetic_site.hpp"
#include "support.hpp"

using namespace compass;
using testsupport::TempDir;

namespace {

const Date kFirst = parse_date("2024-05-09");

struct Offline {
  SimulatedClock clock{start_of_day(kFirst) + std::chrono::hours{9}};
  Gateway gateway{clock};
  EventLog log{nullptr, clock, true};
  std::optional<SyntheticSite> site;
  std::shared_ptr<Fetcher> fixed;
  PipelineEnv env;

  explicit Offline(const std::filesystem::path& registry, bool synthetic = true) {
    env.clock = &clock;
    env.gateway = &gateway;
    env.log = &log;
    env.on_day_start = [this](int day) {
      clock.set(start_of_day(Date{std::chrono::sys_days{kFirst} + std::chrono::days{day}}) + std::chrono::hours{9});
    };
    if (synthetic) {
      site.emplace(load_registry(registry), kFirst, 0);
      env.fetcher_for_day = [this](int day) { return site->fetcher_for_day(day); };
    } else {
      fixed = std::make_shared<FixtureFetcher>(testsupport::fixtures());
      env.fetcher_for_day = [this](int) { return fixed; };
    }
  }
};

PipelineConfig config_for(const std::filesystem::path& registry, const TempDir& dir) {
  PipelineConfig c;
  c.registry_path = registry;
  c.available_models = default_model_specs();
  c.model_ids = {"mock"};
  c.runs_root = dir.path() / "runs";
  c.run_id = "t";
  return c;
}

std::filesystem::path tiny3() { return testsupport::fixtures() / "registries" / "tiny3.csv"; }

}  // namespace

TEST_CASE("three newspapers, two articles a day, one day: six evaluations") {
  TempDir dir;
  Offline off(tiny3());
  auto c = config_for(tiny3(), dir);
  c.params.articles_per_day = 2;
  c.params.days = 1;
  const auto r = run_pipeline(c, off.env);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.evaluations == 6);
  CHECK(r.manifest.complete());
  CHECK(r.manifest.batches.size() == 3);
  const auto store = RunStore::open(c.runs_root, "t");
  CHECK(store.load_evaluations().size() == 6);
  CHECK(std::filesystem::exists(store.dir() / "sources.csv"));
  CHECK(off.log.count("run_finished") == 1);
}

TEST_CASE("a missing registry leaves no run directory behind") {
  TempDir dir;
  Offline off(tiny3());
  auto c = config_for(dir.path() / "absent.csv", dir);
  CHECK_THROWS_AS(run_pipeline(c, off.env), ConfigError);
  CHECK_FALSE(std::filesystem::exists(c.runs_root / "t"));
}

TEST_CASE("unknown models and bad parameters fail before writing") {
  TempDir dir;
  Offline off(tiny3());
  auto c = config_for(tiny3(), dir);
  c.model_ids = {"nope"};
  CHECK_THROWS(run_pipeline(c, off.env));
  c.model_ids = {"mock"};
  c.params.select = 500;
  CHECK_THROWS_AS(run_pipeline(c, off.env), InvalidParameters);
  CHECK_FALSE(std::filesystem::exists(c.runs_root / "t"));
}

TEST_CASE("dry run stores articles without calling any model, then evaluates them") {
  TempDir dir;
  Offline off(tiny3());
  auto c = config_for(tiny3(), dir);
  c.params.days = 2;
  c.dry_run = true;
  const auto dry = run_pipeline(c, off.env);
  CHECK(dry.exit_code == kExitOk);
  CHECK(off.gateway.ledger().empty());
  CHECK(dry.evaluations == 0);
  const auto store = RunStore::open(c.runs_root, "t");
  CHECK(store.load_articles().size() == 3 * 2 * SyntheticSite::kGoodArticlesPerDay);
  CHECK(store.read_manifest().dry_run);

  c.dry_run = false;
  const auto wet = evaluate_stored_run(c, off.env, "t");
  CHECK(wet.evaluations == 3 * 2 * 5);
  CHECK(wet.exit_code == kExitOk);
}

TEST_CASE("a pool smaller than A marks the batch incomplete") {
  TempDir dir;
  Offline off(tiny3());
  auto c = config_for(tiny3(), dir);
  c.params.days = 1;
  c.params.articles_per_day = SyntheticSite::kGoodArticlesPerDay + 1;
  const auto r = run_pipeline(c, off.env);
  CHECK(r.exit_code == kExitIncomplete);
  CHECK(r.evaluations == 3 * SyntheticSite::kGoodArticlesPerDay);
  for (const auto& b : r.manifest.batches) {
    CHECK(b.status == BatchStatus::Incomplete);
    CHECK(b.got == SyntheticSite::kGoodArticlesPerDay);
  }
}

TEST_CASE("a newspaper that cannot be scraped is skipped, the rest carry on") {
  TempDir dir;
  Offline off(tiny3());
  auto inner = off.env.fetcher_for_day;
  off.env.fetcher_for_day = [inner](int day) -> std::shared_ptr<Fetcher> {
    auto real = inner(day);
    return std::make_shared<FunctionFetcher>([real](const Url& u) {
      if (u.host.find("foxnews") != std::string::npos) throw FetchError(0, "connection refused");
      return real->fetch(u);
    });
  };
  auto c = config_for(tiny3(), dir);
  c.params.days = 1;
  const auto r = run_pipeline(c, off.env);
  CHECK(r.evaluations == 10);
  CHECK(r.exit_code == kExitIncomplete);
  int skipped = 0;
  for (const auto& b : r.manifest.batches) skipped += b.status == BatchStatus::Skipped;
  CHECK(skipped == 1);
  CHECK(off.log.count("newspaper_discarded") == 1);
}

TEST_CASE("worker count does not change the store") {
  TempDir dir;
  std::string stores[2];
  for (int i = 0; i < 2; ++i) {
    Offline off(tiny3());
    auto c = config_for(tiny3(), dir);
    c.run_id = "p" + std::to_string(i);
    c.parallel = i == 0 ? 1 : 8;
    c.model_ids = {"mock", "mock-fixed"};
    c.params.days = 2;
    run_pipeline(c, off.env);
    stores[i] = testsupport::read_file(c.runs_root / *c.run_id / "evaluations.jsonl");
  }
  CHECK(!stores[0].empty());
  CHECK(stores[0] == stores[1]);
}

TEST_CASE("articles still on the homepage next day are flagged as repeats") {
  TempDir dir;
  const auto registry = testsupport::fixtures() / "registries" / "example-daily.csv";
  Offline off(registry, false);
  auto c = config_for(registry, dir);
  c.params.articles_per_day = 2;
  c.params.days = 2;
  const auto r = run_pipeline(c, off.env);
  CHECK(r.evaluations == 4);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.manifest.repeated_articles.size() == 2);
  for (const auto& key : r.manifest.repeated_articles) CHECK(key.rfind("mock:", 0) == 0);
}

TEST_CASE("default run ids") {
  CHECK(default_run_id(parse_timestamp("2024-05-09T09:00:00Z")) == "run-20240509T090000Z");
}
