#include "compass/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "compass/event_log.hpp"
#include "compass/gateway.hpp"
#include "compass/pipeline.hpp"
#include "compass/reporter.hpp"
#include "compass/service.hpp"
#include "compass/synthetic_site.hpp"

namespace compass {
namespace fs = std::filesystem;

namespace {

constexpr const char* kSubcommands[] = {"scrape", "evaluate", "analyze", "report", "serve", "mock-run"};

// First simulated day of offline runs.
const Date kOfflineFirstDay{std::chrono::year{2024}, std::chrono::May, std::chrono::day{9}};
constexpr std::chrono::hours kOfflineBatchHour{9};

fs::path default_registry() {
  if (fs::exists("data/sources.csv")) return "data/sources.csv";
  return fs::path(COMPASS_SOURCE_DIR) / "data" / "sources.csv";
}

std::vector<ModelSpec> merged_specs(const std::optional<config::Document>& doc) {
  std::vector<ModelSpec> specs = default_model_specs();
  if (!doc) return specs;
  for (auto& m : model_specs_from_config(*doc)) {
    auto it = std::find_if(specs.begin(), specs.end(), [&](const ModelSpec& s) { return s.id == m.id; });
    if (it != specs.end()) {
      *it = std::move(m);
    } else {
      specs.push_back(std::move(m));
    }
  }
  return specs;
}

std::string defaults_footer() {
  const RunParameters d;
  std::ostringstream s;
  s << "Run parameter defaults: N (--max-links) = " << d.max_links << ", S (--select) = " << d.select
    << ", MIN (--min-chars) = " << d.min_chars << ", MAX (--max-chars) = " << d.max_chars
    << ", A (--articles-per-day) = " << d.articles_per_day << ", days = " << d.days << ".\n"
    << "Precedence: flags override the --config file, which overrides these defaults.\n"
    << "Exit codes: 0 success, 1 usage, 2 config, 3 storage, 4 incomplete run.";
  return s.str();
}

PipelineConfig pipeline_config(const CliInvocation& inv) {
  PipelineConfig c;
  c.registry_path = inv.registry;
  c.available_models = inv.model_specs;
  c.model_ids = inv.models;
  c.params = inv.params;
  c.runs_root = inv.out;
  c.run_id = inv.run_id;
  c.parallel = inv.parallel;
  c.dry_run = inv.dry_run;
  c.seed = inv.seed;
  c.batch.retry_budget = inv.retry_budget;
  c.batch.malformed_retries = inv.malformed_retries;
  return c;
}

void write_sorted_ledger(const fs::path& path, std::vector<LedgerEntry> entries) {
  std::vector<std::string> lines;
  for (const auto& e : entries) lines.push_back(ledger_line(e));
  std::sort(lines.begin(), lines.end());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw StorageError("cannot write " + path.string());
}

void print_result(std::ostream& out, const PipelineResult& r) {
  nlohmann::json j = {{"run_id", r.run_id},
                      {"dir", r.dir.string()},
                      {"evaluations", r.evaluations},
                      {"provider_calls", r.provider_calls},
                      {"status", r.manifest.dry_run ? "dry-run" : r.manifest.complete() ? "complete" : "incomplete"}};
  out << j.dump() << '\n';
}

int cmd_mock_run(const CliInvocation& inv, std::ostream& out, EventLog& log) {
  SimulatedClock clock(start_of_day(kOfflineFirstDay) + kOfflineBatchHour);
  GatewayOptions gopts;
  gopts.mock_seed = inv.seed;
  Gateway gateway(clock, gopts);

  PipelineConfig config = pipeline_config(inv);
  if (!config.run_id) config.run_id = "mock-seed" + std::to_string(inv.seed);

  std::optional<SyntheticSite> site;
  std::shared_ptr<Fetcher> fixture;
  PipelineEnv env;
  env.clock = &clock;
  env.gateway = &gateway;
  env.log = &log;
  env.on_day_start = [&](int day) {
    clock.set(start_of_day(Date{std::chrono::sys_days{kOfflineFirstDay} + std::chrono::days{day}}) +
              kOfflineBatchHour);
  };
  if (inv.fixtures) {
    fixture = std::make_shared<FixtureFetcher>(*inv.fixtures);
    env.fetcher_for_day = [&](int) { return fixture; };
  } else {
    // The site is built from the registry the pipeline will load; a bad
    // registry fails here with the same error the pipeline would raise.
    const auto sources = load_registry(inv.registry);
    site.emplace(sources, kOfflineFirstDay, inv.seed);
    env.fetcher_for_day = [&](int day) { return site->fetcher_for_day(day); };
  }

  PipelineResult r = run_pipeline(config, env);
  write_sorted_ledger(r.dir / "requests.jsonl", gateway.ledger());
  if (!inv.dry_run) {
    const RunStore store = RunStore::open(inv.out, r.run_id);
    emit_bundle(store, inv.report_dir.value_or(r.dir / "report"), {inv.centre_band});
  }
  print_result(out, r);
  return r.exit_code;
}

int cmd_live(const CliInvocation& inv, std::ostream& out, EventLog& log, bool scrape_only) {
  SystemClock clock;
  PipelineConfig config = pipeline_config(inv);
  if (scrape_only) config.dry_run = true;
  if (!config.run_id) config.run_id = default_run_id(clock.now());

  GatewayOptions gopts;
  gopts.mock_seed = inv.seed;
  gopts.ledger_path = inv.out / *config.run_id / "requests.jsonl";
  Gateway gateway(clock, gopts);

  PipelineEnv env;
  env.clock = &clock;
  env.gateway = &gateway;
  env.log = &log;

  // evaluate on an existing (scraped) run consumes its stored articles.
  if (!scrape_only && inv.run_id && fs::exists(inv.out / *inv.run_id / "manifest.json")) {
    PipelineResult r = evaluate_stored_run(config, env, *inv.run_id);
    print_result(out, r);
    return r.exit_code;
  }

  std::shared_ptr<Fetcher> fetcher;
  if (inv.fixtures) {
    fetcher = std::make_shared<FixtureFetcher>(*inv.fixtures);
  } else {
    fetcher = std::make_shared<HttpFetcher>(HttpFetcherOptions{}, clock);
  }
  env.fetcher_for_day = [&](int) { return fetcher; };
  if (config.params.days > 1) {
    log.emit("note", {{"message", "live runs collect one batch per invocation; schedule daily runs externally"}});
    config.params.days = 1;
  }
  PipelineResult r = run_pipeline(config, env);
  print_result(out, r);
  return r.exit_code;
}

int cmd_analyze(const CliInvocation& inv, std::ostream& out) {
  if (!inv.run_id) throw UsageError("analyze requires --run-id");
  const RunStore store = RunStore::open(inv.out, *inv.run_id);
  out << bundle_json(build_bundle(store, {inv.centre_band})).dump(2) << '\n';
  return kExitOk;
}

int cmd_report(const CliInvocation& inv, std::ostream& out) {
  if (!inv.run_id) throw UsageError("report requires --run-id");
  const RunStore store = RunStore::open(inv.out, *inv.run_id);
  const fs::path dir = inv.report_dir.value_or(store.dir() / "report");
  const auto bundle = emit_bundle(store, dir, {inv.centre_band});
  for (const auto& f : bundle.files) out << (dir / f).string() << '\n';
  return kExitOk;
}

int cmd_serve(const CliInvocation& inv, EventLog& log) {
  SystemClock clock;
  GatewayOptions gopts;
  gopts.mock_seed = inv.seed;
  gopts.ledger_path = inv.out / inv.service_run / "requests.jsonl";
  Gateway gateway(clock, gopts);
  std::shared_ptr<Fetcher> fetcher;
  if (inv.fixtures) {
    fetcher = std::make_shared<FixtureFetcher>(*inv.fixtures);
  } else {
    fetcher = std::make_shared<HttpFetcher>(HttpFetcherOptions{}, clock);
  }
  ServiceConfig sc;
  sc.models = inv.model_specs;
  sc.params = inv.params;
  sc.runs_root = inv.out;
  sc.store_run = inv.service_run;
  sc.cors_origin = inv.cors_origin;
  sc.retry_budget = inv.retry_budget;
  ApiService service(sc, *fetcher, gateway, clock, &log);
  httplib::Server server;
  service.mount(server);
  log.emit("listening", {{"host", inv.host}, {"port", inv.port}});
  if (!server.listen(inv.host, inv.port)) throw ConfigError("cannot listen on " + inv.host + ":" + std::to_string(inv.port));
  return kExitOk;
}

}  // namespace

CliInvocation parse_flags(const std::vector<std::string>& args) {
  CliInvocation inv;
  const RunParameters d;
  CLI::App app{"Audit how language models place newspaper articles on a two-axis political compass.",
               "compass-audit"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.footer(defaults_footer());

  std::optional<std::string> config_path, registry, out, fixtures, report_dir;
  int max_links = d.max_links, select = d.select, min_chars = d.min_chars, max_chars = d.max_chars;
  int articles = d.articles_per_day, days = d.days;

  app.add_option("--config", config_path, "Model and run-parameter config file (TOML)");
  app.add_option("--registry", registry, "Newspaper registry CSV (default data/sources.csv)");
  app.add_option("--models,--model", inv.models, "Comma-separated model ids (default mock)")->delimiter(',');
  auto* o_n = app.add_option("--max-links", max_links, "N: hyperlinks kept per homepage")->capture_default_str();
  auto* o_s = app.add_option("--select", select, "S: longest URLs selected per homepage")->capture_default_str();
  auto* o_min = app.add_option("--min-chars", min_chars, "MIN: minimum article length")->capture_default_str();
  auto* o_max = app.add_option("--max-chars", max_chars, "MAX: maximum article length")->capture_default_str();
  auto* o_a = app.add_option("--articles-per-day,--articles", articles, "A: valid evaluations per newspaper per day")
                  ->capture_default_str();
  auto* o_days = app.add_option("--days", days, "Number of daily batches")->capture_default_str();
  app.add_option("--out", out, "Runs directory (default runs)");
  app.add_option("--run-id", inv.run_id, "Run id (default derived from the start time or seed)");
  app.add_option("--parallel", inv.parallel, "Newspapers processed concurrently")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--dry-run", inv.dry_run, "Scrape and select only; no provider calls");
  app.add_option("--seed", inv.seed, "Mock provider seed")->capture_default_str();
  app.add_option("--fixtures", fixtures, "Serve pages from a fixture directory instead of the network");
  app.add_option("--retry-budget", inv.retry_budget, "Retries for timeouts, 429 and 5xx")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--malformed-retries", inv.malformed_retries, "Re-asks after a malformed answer before skipping the article")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--report-dir", report_dir, "Report output directory (default <run>/report)");
  app.add_option("--centre-band", inv.centre_band, "Centre tolerance for label agreement")->capture_default_str();
  app.add_option("--host", inv.host, "Listen address")->capture_default_str();
  app.add_option("--port", inv.port, "Listen port")->capture_default_str();
  app.add_option("--cors-origin", inv.cors_origin, "Origin allowed to call the API from a browser");
  app.add_option("--service-run", inv.service_run, "Run directory used by the API service")->capture_default_str();

  app.add_subcommand("scrape", "Scrape homepages and store length-filtered articles (no provider calls)");
  app.add_subcommand("evaluate", "Scrape and evaluate, or evaluate the stored articles of --run-id");
  app.add_subcommand("analyze", "Print the statistics of a run as JSON");
  app.add_subcommand("report", "Write CSV datasets and report.md for a run");
  app.add_subcommand("serve", "Run the HTTP API");
  app.add_subcommand("mock-run", "Offline run against generated sites with the mock provider");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    inv.help = true;
    inv.help_text = app.help();
    return inv;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  for (const char* name : kSubcommands) {
    if (app.got_subcommand(name)) inv.subcommand = name;
  }

  std::optional<config::Document> doc;
  if (config_path) {
    inv.config_path = *config_path;
    doc = config::load(*config_path);
  }
  inv.model_specs = merged_specs(doc);
  if (doc) inv.params = run_parameters_from_config(*doc, inv.params);

  bool param_flag = false;
  const auto overlay = [&](CLI::Option* opt, int value, int& field) {
    if (opt->count() > 0) {
      field = value;
      param_flag = true;
    }
  };
  overlay(o_n, max_links, inv.params.max_links);
  overlay(o_s, select, inv.params.select);
  overlay(o_min, min_chars, inv.params.min_chars);
  overlay(o_max, max_chars, inv.params.max_chars);
  overlay(o_a, articles, inv.params.articles_per_day);
  overlay(o_days, days, inv.params.days);
  try {
    inv.params.validate();
  } catch (const InvalidParameters& e) {
    if (param_flag) throw UsageError(e.what());
    throw;
  }

  inv.registry = registry ? fs::path(*registry) : default_registry();
  if (out) inv.out = *out;
  if (fixtures) inv.fixtures = *fixtures;
  if (report_dir) inv.report_dir = *report_dir;
  if (inv.models.empty()) inv.models = {"mock"};
  if (inv.run_id && !RunStore::valid_run_id(*inv.run_id)) throw UsageError("invalid run id '" + *inv.run_id + "'");
  return inv;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  SystemClock wall;
  EventLog log(&err, wall);
  const auto fatal = [&](int code, std::string_view kind, const std::exception& e) {
    log.emit("fatal", {{"kind", kind}, {"error", e.what()}, {"exit_code", code}});
    return code;
  };
  try {
    const CliInvocation inv = parse_flags(args);
    if (inv.help) {
      out << inv.help_text << '\n';
      return kExitOk;
    }
    if (inv.subcommand == "mock-run") return cmd_mock_run(inv, out, log);
    if (inv.subcommand == "scrape") return cmd_live(inv, out, log, true);
    if (inv.subcommand == "evaluate") return cmd_live(inv, out, log, false);
    if (inv.subcommand == "analyze") return cmd_analyze(inv, out);
    if (inv.subcommand == "report") return cmd_report(inv, out);
    if (inv.subcommand == "serve") return cmd_serve(inv, log);
    throw UsageError("unknown subcommand");
  } catch (const UsageError& e) {
    return fatal(kExitUsage, "usage", e);
  } catch (const ConfigError& e) {
    return fatal(kExitConfig, "config", e);
  } catch (const MalformedRow& e) {
    return fatal(kExitConfig, "config", e);
  } catch (const DuplicateId& e) {
    return fatal(kExitConfig, "config", e);
  } catch (const UnknownModel& e) {
    return fatal(kExitConfig, "config", e);
  } catch (const AmbiguousModel& e) {
    return fatal(kExitConfig, "config", e);
  } catch (const StorageError& e) {
    return fatal(kExitStorage, "storage", e);
  } catch (const UnknownRun& e) {
    return fatal(kExitStorage, "storage", e);
  } catch (const std::exception& e) {
    return fatal(kExitStorage, "runtime", e);
  }
}

}  // namespace compass
