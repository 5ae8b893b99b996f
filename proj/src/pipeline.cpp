#include "compass/pipeline.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

#include "compass/harvester.hpp"

namespace compass {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Harvest {
  bool ok = false;
  std::string error;
  std::vector<ArticleRecord> pool;
};

void emit(EventLog* log, std::string_view event, json fields) {
  if (log) log->emit(event, std::move(fields));
}

Harvest harvest(const NewspaperSource& src, Fetcher& fetcher, const RunParameters& p, const Clock& clock,
                EventLog* log) {
  Harvest h;
  const auto home = Url::parse(src.homepage_url);
  std::vector<CandidateUrl> links;
  try {
    links = scrape_hyperlinks(fetcher, *home, p.max_links);
  } catch (const Error& e) {
    h.error = e.what();
    emit(log, "newspaper_discarded", {{"newspaper_id", src.id}, {"reason", h.error}});
    return h;
  }
  const auto selected = select_longest_urls(links, p.select);
  std::vector<ArticleRecord> extracted;
  std::set<std::string> seen;
  for (const auto& c : selected) {
    try {
      auto rec = extract_article(fetcher, *Url::parse(c.url), src.id, clock);
      if (!seen.insert(rec.id).second) continue;
      extracted.push_back(std::move(rec));
    } catch (const Error& e) {
      emit(log, "url_skipped", {{"newspaper_id", src.id}, {"url", c.url}, {"reason", e.what()}});
    }
  }
  h.pool = filter_by_length(extracted, p.min_chars, p.max_chars);
  h.ok = true;
  emit(log, "harvested", {{"newspaper_id", src.id},
                          {"links", links.size()},
                          {"selected", selected.size()},
                          {"extracted", extracted.size()},
                          {"pool", h.pool.size()}});
  return h;
}

struct ModelBatch {
  BatchResult result;
  std::string note;
};

ModelBatch run_batch(Gateway& gateway, const Clock& clock, const NewspaperSource& src, const ModelSpec& model,
                     std::span<const ArticleRecord> pool, const PipelineConfig& config, EventLog* log) {
  ModelBatch mb;
  try {
    mb.result = collect_daily_batch(gateway, clock, src, model, pool, config.params.articles_per_day, config.batch, log);
  } catch (const QuotaExhausted& e) {
    mb.result.status = BatchStatus::Incomplete;
    mb.result.shortfall.emplace(0, config.params.articles_per_day);
    mb.note = e.what();
  }
  if (mb.result.shortfall && mb.note.empty()) mb.note = mb.result.shortfall->what();
  if (mb.result.shortfall) {
    emit(log, "batch_incomplete", {{"newspaper_id", src.id},
                                   {"model_id", model.id},
                                   {"got", mb.result.shortfall->got()},
                                   {"wanted", mb.result.shortfall->wanted()},
                                   {"reason", mb.note}});
  }
  return mb;
}

std::string decoding_note(const ModelSpec& m, std::uint64_t seed) {
  if (m.provider != ProviderKind::Mock) return "provider defaults";
  if (m.mock_mode == MockMode::Fixed) return "mock: fixed [0, 0]";
  return "mock: hash, seed " + std::to_string(seed);
}

// Tracks (model, article) pairs across days to flag repeats.
class RepeatTracker {
 public:
  void note(const Evaluation& e, RunManifest& m) {
    const std::string key = e.model_id + ":" + e.article_id;
    auto [it, inserted] = first_day_.try_emplace(key, e.batch_day);
    if (!inserted && it->second != e.batch_day && flagged_.insert(key).second) m.repeated_articles.push_back(key);
  }

 private:
  std::map<std::string, Date> first_day_;
  std::set<std::string> flagged_;
};

// Appends one newspaper's evaluations for one model and records the batch.
void commit_batch(RunStore& store, RunManifest& manifest, RepeatTracker& repeats, const NewspaperSource& src,
                  const ModelSpec& model, Date day, ModelBatch& mb, int wanted, EventLog* log, std::size_t& count) {
  std::vector<Evaluation> fresh;
  for (auto& e : mb.result.evaluations) {
    if (store.has_evaluation(e.article_id, e.model_id, e.batch_day)) {
      emit(log, "evaluation_dropped", {{"newspaper_id", src.id},
                                       {"model_id", model.id},
                                       {"article_id", e.article_id},
                                       {"reason", "already evaluated today under another newspaper"}});
      continue;
    }
    fresh.push_back(std::move(e));
  }
  store.append_evaluations(fresh);
  Money cost;
  for (const auto& e : fresh) {
    repeats.note(e, manifest);
    cost += e.cost;
  }
  manifest.total_cost[model.id] += cost;
  count += fresh.size();

  BatchRecord rec;
  rec.day = day;
  rec.newspaper_id = src.id;
  rec.model_id = model.id;
  rec.got = static_cast<int>(fresh.size());
  rec.wanted = wanted;
  rec.status = rec.got >= wanted ? BatchStatus::Complete : BatchStatus::Incomplete;
  rec.note = rec.status == BatchStatus::Complete ? "" : (mb.note.empty() ? "duplicate articles dropped" : mb.note);
  manifest.batches.push_back(std::move(rec));
}

std::vector<ModelSpec> resolve_models(const PipelineConfig& config) {
  if (config.model_ids.empty()) throw ConfigError("no models selected");
  std::vector<ModelSpec> out;
  std::set<std::string> seen;
  for (const auto& id : config.model_ids) {
    if (!seen.insert(id).second) continue;
    try {
      out.push_back(resolve_model(id, config.available_models));
    } catch (const UnknownModel& e) {
      throw ConfigError(e.what());
    } catch (const AmbiguousModel& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

void require_env(const PipelineEnv& env) {
  if (!env.clock || !env.gateway || !env.fetcher_for_day) throw ConfigError("pipeline environment incomplete");
}

}  // namespace

std::string default_run_id(Timestamp t) {
  std::string s = format_timestamp(t);  // 2024-05-09T09:00:00.000Z
  std::string out = "run-";
  for (char c : s.substr(0, 19)) {
    if (c != '-' && c != ':') out.push_back(c);
  }
  return out + "Z";
}

PipelineResult run_pipeline(const PipelineConfig& config, PipelineEnv& env) {
  require_env(env);
  // Everything that can fail on bad input happens before the run directory exists.
  config.params.validate();
  const auto sources = load_registry(config.registry_path);
  const auto models = resolve_models(config);

  PipelineResult result;
  result.run_id = config.run_id.value_or(default_run_id(env.clock->now()));
  RunStore store = RunStore::create(config.runs_root, result.run_id);
  result.dir = store.dir();
  {
    std::ofstream snap(store.dir() / "sources.csv", std::ios::binary | std::ios::trunc);
    snap << serialize_registry(sources);
    if (!snap) throw StorageError("cannot write registry snapshot");
  }

  RunManifest& manifest = result.manifest;
  manifest.run_id = result.run_id;
  manifest.parameters = config.params;
  for (const auto& m : models) {
    manifest.model_ids.push_back(m.id);
    manifest.total_cost[m.id] = Money{};
    manifest.decoding[m.id] = decoding_note(m, config.seed);
  }
  manifest.started_at = env.clock->now();
  manifest.seed = config.seed;
  manifest.dry_run = config.dry_run;
  store.write_manifest(manifest);
  emit(env.log, "run_started", {{"run_id", result.run_id},
                                {"newspapers", sources.size()},
                                {"models", manifest.model_ids},
                                {"days", config.params.days},
                                {"dry_run", config.dry_run}});

  const std::size_t calls_before = env.gateway->request_count();
  RepeatTracker repeats;
  const int workers = std::max(1, config.parallel);

  for (int day = 0; day < config.params.days; ++day) {
    if (env.on_day_start) env.on_day_start(day);
    const Date batch_day = utc_date(env.clock->now());
    auto fetcher = env.fetcher_for_day(day);
    emit(env.log, "day_started", {{"day", day}, {"date", format_date(batch_day)}});

    struct Slot {
      Harvest harvest;
      std::vector<ModelBatch> batches;
    };
    std::vector<Slot> slots(sources.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mu;

    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= sources.size()) return;
        try {
          Slot& s = slots[i];
          s.harvest = harvest(sources[i], *fetcher, config.params, *env.clock, env.log);
          if (!s.harvest.ok || config.dry_run) continue;
          for (const auto& m : models) {
            s.batches.push_back(run_batch(*env.gateway, *env.clock, sources[i], m, s.harvest.pool, config, env.log));
          }
        } catch (...) {
          std::lock_guard lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          next = sources.size();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min<int>(workers, static_cast<int>(sources.size())); ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (fatal) std::rethrow_exception(fatal);

    for (std::size_t i = 0; i < sources.size(); ++i) {
      Slot& s = slots[i];
      if (!s.harvest.ok) {
        if (config.dry_run) continue;
        for (const auto& m : models) {
          manifest.batches.push_back({batch_day, sources[i].id, m.id, 0, config.params.articles_per_day,
                                      BatchStatus::Skipped, "homepage scrape failed: " + s.harvest.error});
        }
        continue;
      }
      store.append_articles(s.harvest.pool);
      for (std::size_t k = 0; k < s.batches.size(); ++k) {
        commit_batch(store, manifest, repeats, sources[i], models[k], batch_day, s.batches[k],
                     config.params.articles_per_day, env.log, result.evaluations);
      }
    }
    store.write_manifest(manifest);
  }

  manifest.finished_at = env.clock->now();
  store.write_manifest(manifest);
  result.provider_calls = env.gateway->request_count() - calls_before;
  result.exit_code = config.dry_run || manifest.complete() ? kExitOk : kExitIncomplete;
  emit(env.log, "run_finished", {{"run_id", result.run_id},
                                 {"evaluations", result.evaluations},
                                 {"provider_calls", result.provider_calls},
                                 {"status", config.dry_run ? "dry-run" : manifest.complete() ? "complete" : "incomplete"}});
  return result;
}

PipelineResult evaluate_stored_run(const PipelineConfig& config, PipelineEnv& env, const std::string& run_id) {
  if (!env.clock || !env.gateway) throw ConfigError("pipeline environment incomplete");
  config.params.validate();
  const auto models = resolve_models(config);
  RunStore store = RunStore::open(config.runs_root, run_id);
  PipelineResult result;
  result.run_id = run_id;
  result.dir = store.dir();
  RunManifest& manifest = result.manifest;
  manifest = store.read_manifest();
  manifest.dry_run = false;
  for (const auto& m : models) {
    if (std::find(manifest.model_ids.begin(), manifest.model_ids.end(), m.id) == manifest.model_ids.end()) {
      manifest.model_ids.push_back(m.id);
    }
    manifest.total_cost.try_emplace(m.id);
    manifest.decoding[m.id] = decoding_note(m, config.seed);
  }

  std::vector<NewspaperSource> sources;
  if (fs::exists(store.dir() / "sources.csv")) sources = load_registry(store.dir() / "sources.csv");
  std::map<std::string, NewspaperSource> by_id;
  for (const auto& s : sources) by_id[s.id] = s;

  // Pools keyed by scrape day, then newspaper, in stored order.
  std::map<std::string, std::vector<std::pair<std::string, std::vector<ArticleRecord>>>> pools;
  for (auto& a : store.load_articles()) {
    auto& day = pools[format_date(utc_date(a.fetched_at))];
    auto it = std::find_if(day.begin(), day.end(), [&](const auto& p) { return p.first == a.newspaper_id; });
    if (it == day.end()) {
      day.emplace_back(a.newspaper_id, std::vector<ArticleRecord>{});
      it = std::prev(day.end());
    }
    it->second.push_back(std::move(a));
  }

  const std::size_t calls_before = env.gateway->request_count();
  RepeatTracker repeats;
  for (const auto& e : store.load_evaluations()) repeats.note(e, manifest);
  for (auto& [day, newspapers] : pools) {
    for (auto& [newspaper_id, pool] : newspapers) {
      NewspaperSource src;
      src.id = newspaper_id;
      if (auto it = by_id.find(newspaper_id); it != by_id.end()) src = it->second;
      for (const auto& m : models) {
        ModelBatch mb = run_batch(*env.gateway, *env.clock, src, m, pool, config, env.log);
        commit_batch(store, manifest, repeats, src, m, utc_date(env.clock->now()), mb,
                     config.params.articles_per_day, env.log, result.evaluations);
      }
    }
  }
  manifest.finished_at = env.clock->now();
  store.write_manifest(manifest);
  result.provider_calls = env.gateway->request_count() - calls_before;
  result.exit_code = manifest.complete() ? kExitOk : kExitIncomplete;
  return result;
}

}  // namespace compass
