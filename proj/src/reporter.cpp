#include "compass/reporter.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "compass/csv.hpp"

namespace compass {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixed2(double v) {
  if (std::abs(v) < 0.005) v = 0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw StorageError("cannot write " + p.string());
}

std::string csv_line(const std::vector<std::string>& fields) { return csv::join_row(fields) + "\n"; }

std::vector<NewspaperSource> run_sources(const RunStore& store) {
  const fs::path p = store.dir() / "sources.csv";
  if (!fs::exists(p)) return {};
  return load_registry(p);
}

std::string scatter_csv(const ModelReport& m) {
  std::string s = csv_line({"kind", "newspaper_id", "n", "mean_economic", "mean_democracy", "std_economic",
                            "std_democracy"});
  for (const auto& n : m.summaries) {
    s += csv_line({"newspaper", n.newspaper_id, std::to_string(n.n), format_number(n.mean_economic),
                   format_number(n.mean_democracy), opt_number(n.std_economic), opt_number(n.std_democracy)});
  }
  if (m.global_mean) {
    s += csv_line({"global_mean", "", std::to_string(m.summaries.size()), format_number(m.global_mean->first),
                   format_number(m.global_mean->second), "", ""});
  }
  return s;
}

std::string heatmap_csv(const HeatmapGrid& g) {
  std::string s = csv_line({"econ_bin", "dem_bin", "count"});
  for (int e = -10; e <= 10; ++e) {
    for (int d = -10; d <= 10; ++d) s += csv_line({std::to_string(e), std::to_string(d), std::to_string(g.at(e, d))});
  }
  return s;
}

void boxplot_rows(std::string& s, const ModelReport& m, Axis axis) {
  const Dispersion& d = axis == Axis::Economic ? m.economic : m.democracy;
  for (const auto& n : m.summaries) {
    if (const auto v = n.stddev(axis)) s += csv_line({m.model_id, "std", n.newspaper_id, format_number(*v)});
  }
  if (!d.summary) return;
  const auto& f = *d.summary;
  const std::pair<const char*, double> stats[] = {{"min", f.min},       {"q1", f.q1},
                                                  {"median", f.median}, {"q3", f.q3},
                                                  {"max", f.max},       {"lower_fence", d.lower_fence},
                                                  {"upper_fence", d.upper_fence}};
  for (const auto& [kind, v] : stats) s += csv_line({m.model_id, kind, "", format_number(v)});
  for (double o : d.outliers) s += csv_line({m.model_id, "outlier", "", format_number(o)});
}

std::string disagreement_csv(const DisagreementReport& r) {
  std::string s = csv_line({"model_a", "model_b", "shared_articles", "mean_distance"});
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& [k, v] : r.mean_distance) keys.insert(k);
  for (const auto& k : r.no_shared_articles) keys.insert(k);
  for (const auto& k : keys) {
    auto it = r.mean_distance.find(k);
    if (it == r.mean_distance.end()) {
      s += csv_line({k.first, k.second, "0", ""});
    } else {
      s += csv_line({k.first, k.second, std::to_string(r.shared_articles.at(k)), format_number(it->second)});
    }
  }
  return s;
}

std::string agreement_csv(const ReportBundle& b) {
  std::string s = csv_line({"model_id", "newspaper_id", "label", "mean_economic", "verdict"});
  for (const auto& m : b.models) {
    for (const auto& r : m.agreement.rows) {
      s += csv_line({m.model_id, r.newspaper_id, std::string(label_name(r.label)), format_number(r.mean_economic),
                     std::string(verdict_name(r.verdict))});
    }
  }
  return s;
}

json dispersion_json(const Dispersion& d) {
  json j = {{"values", d.values}, {"outliers", d.outliers}};
  if (d.summary) {
    j["summary"] = {{"min", d.summary->min},       {"q1", d.summary->q1}, {"median", d.summary->median},
                    {"q3", d.summary->q3},         {"max", d.summary->max}, {"lower_fence", d.lower_fence},
                    {"upper_fence", d.upper_fence}};
  } else {
    j["summary"] = nullptr;
  }
  return j;
}

}  // namespace

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
  return buf;
}

std::string format_number(double v) {
  if (v == 0) v = 0;  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ReportBundle build_bundle(const RunStore& store, const ReportOptions& options) {
  ReportBundle b;
  b.run_id = store.run_id();
  const auto evals = store.load_evaluations();
  auto grouped = by_model(evals);

  std::vector<std::string> order;
  if (store.has_manifest()) order = store.read_manifest().model_ids;
  for (const auto& [id, _] : grouped) {
    if (std::find(order.begin(), order.end(), id) == order.end()) order.push_back(id);
  }
  const auto sources = run_sources(store);

  for (const auto& id : order) {
    ModelReport m;
    m.model_id = id;
    m.heatmap.model_id = id;
    m.agreement.model_id = id;
    auto it = grouped.find(id);
    if (it != grouped.end() && !it->second.empty()) {
      const auto& ev = it->second;
      m.evaluations = ev.size();
      m.summaries = newspaper_means(ev);
      m.global_mean = global_mean(m.summaries);
      m.heatmap = heatmap(ev);
      m.economic = dispersion_distribution(m.summaries, Axis::Economic);
      m.democracy = dispersion_distribution(m.summaries, Axis::Democracy);
      m.agreement = sign_agreement_with_labels(m.summaries, sources, options.centre_band);
      m.integer_pair_fraction = integer_pair_fraction(ev);
    }
    b.models.push_back(std::move(m));
  }
  b.disagreement = pairwise_model_disagreement(grouped);
  b.markdown = render_markdown(b, options);
  return b;
}

ReportBundle emit_bundle(const RunStore& store, const fs::path& out_dir, const ReportOptions& options) {
  ReportBundle b = build_bundle(store, options);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw StorageError("cannot create " + out_dir.string() + ": " + ec.message());

  for (const auto& m : b.models) {
    b.files.push_back("scatter_" + m.model_id + ".csv");
    write_file(out_dir / b.files.back(), scatter_csv(m));
    b.files.push_back("heatmap_" + m.model_id + ".csv");
    write_file(out_dir / b.files.back(), heatmap_csv(m.heatmap));
  }
  for (Axis axis : {Axis::Economic, Axis::Democracy}) {
    std::string s = csv_line({"model_id", "kind", "newspaper_id", "value"});
    for (const auto& m : b.models) boxplot_rows(s, m, axis);
    b.files.push_back("boxplot_" + std::string(axis_name(axis)) + ".csv");
    write_file(out_dir / b.files.back(), s);
  }
  b.files.push_back("disagreement.csv");
  write_file(out_dir / b.files.back(), disagreement_csv(b.disagreement));
  b.files.push_back("agreement.csv");
  write_file(out_dir / b.files.back(), agreement_csv(b));
  b.markdown = render_markdown(b, options);
  b.files.push_back("report.md");
  write_file(out_dir / b.files.back(), b.markdown);
  return b;
}

std::string render_markdown(const ReportBundle& b, const ReportOptions& options) {
  std::string s = "# Compass audit report: run `" + b.run_id + "`\n\n";
  std::size_t total = 0;
  for (const auto& m : b.models) total += m.evaluations;
  s += "Models: " + std::to_string(b.models.size()) + ". Evaluations: " + std::to_string(total) + ".\n";

  for (const auto& m : b.models) {
    s += "\n## Model `" + m.model_id + "`\n\n";
    if (m.evaluations == 0) {
      s += "_No evaluations for this model._\n";
      continue;
    }
    s += "- Evaluations: " + std::to_string(m.evaluations) + " across " + std::to_string(m.summaries.size()) +
         " newspapers\n";
    s += "- Global mean (economic, democracy): (" + fixed2(m.global_mean->first) + ", " +
         fixed2(m.global_mean->second) + ")\n";
    s += "- Integer-pair fraction: " + format_percent(m.integer_pair_fraction.value_or(0)) + "\n";
    s += "- Top heatmap cells:\n";
    for (const auto& c : m.heatmap.top_cells(options.top_cells)) {
      s += "  - (" + std::to_string(c.economic) + "," + std::to_string(c.democracy) +
           "): " + format_percent(static_cast<double>(c.count) / static_cast<double>(m.evaluations)) + "\n";
    }
    if (m.heatmap.log_scale_advised()) {
      s += "- Heatmap: log-scale colour map advised (largest cell holds " + std::to_string(m.heatmap.max_count()) +
           " evaluations)\n";
    }
    const auto median = [](const Dispersion& d) { return d.summary ? fixed2(d.summary->median) : std::string("n/a"); };
    s += "- Median per-newspaper std: economic " + median(m.economic) + ", democracy " + median(m.democracy) + "\n";
    if (auto r = m.agreement.rate()) {
      s += "- Label sign agreement (economic axis, centre band +-" + fixed2(options.centre_band) +
           "): " + std::to_string(m.agreement.agreed) + "/" + std::to_string(m.agreement.labeled) + " (" +
           format_percent(*r) + ")\n";
    } else {
      s += "- Label sign agreement: no labeled newspapers\n";
    }
    s += "\nData: [scatter](scatter_" + m.model_id + ".csv), [heatmap](heatmap_" + m.model_id + ".csv)\n";
  }

  s += "\n## Cross-model disagreement\n\n";
  s += "Mean Euclidean distance between two models' scores on shared articles. This is a consistency\n"
       "instrument of this toolkit, not a published statistic.\n\n";
  if (b.disagreement.mean_distance.empty() && b.disagreement.no_shared_articles.empty()) {
    s += "Fewer than two models with evaluations.\n";
  }
  for (const auto& [k, v] : b.disagreement.mean_distance) {
    s += "- " + k.first + " vs " + k.second + ": " + fixed2(v) + " over " +
         std::to_string(b.disagreement.shared_articles.at(k)) + " articles\n";
  }
  for (const auto& k : b.disagreement.no_shared_articles) {
    s += "- " + k.first + " vs " + k.second + ": no shared articles\n";
  }

  s += "\n## Files\n\n";
  s += "- [boxplot_economic.csv](boxplot_economic.csv)\n- [boxplot_democracy.csv](boxplot_democracy.csv)\n";
  s += "- [disagreement.csv](disagreement.csv)\n- [agreement.csv](agreement.csv)\n";
  for (const auto& m : b.models) {
    s += "- [scatter_" + m.model_id + ".csv](scatter_" + m.model_id + ".csv), [heatmap_" + m.model_id +
         ".csv](heatmap_" + m.model_id + ".csv)\n";
  }
  return s;
}

json bundle_json(const ReportBundle& b) {
  json models = json::array();
  for (const auto& m : b.models) {
    json points = json::array();
    for (const auto& n : m.summaries) {
      points.push_back({{"newspaper_id", n.newspaper_id},
                        {"n", n.n},
                        {"economic", n.mean_economic},
                        {"democracy", n.mean_democracy},
                        {"std_economic", n.std_economic ? json(*n.std_economic) : json(nullptr)},
                        {"std_democracy", n.std_democracy ? json(*n.std_democracy) : json(nullptr)}});
    }
    json counts = json::array();
    for (const auto& row : m.heatmap.counts) counts.push_back(row);
    json top = json::array();
    for (const auto& c : m.heatmap.top_cells(5)) {
      top.push_back({{"economic", c.economic}, {"democracy", c.democracy}, {"count", c.count}});
    }
    models.push_back(
        {{"model_id", m.model_id},
         {"evaluations", m.evaluations},
         {"scatter",
          {{"points", points},
           {"global_mean", m.global_mean ? json{{"economic", m.global_mean->first}, {"democracy", m.global_mean->second}}
                                         : json(nullptr)}}},
         {"heatmap",
          {{"counts", counts},
           {"total", m.heatmap.total()},
           {"max", m.heatmap.max_count()},
           {"log_scale", m.heatmap.log_scale_advised()},
           {"top_cells", top}}},
         {"dispersion", {{"economic", dispersion_json(m.economic)}, {"democracy", dispersion_json(m.democracy)}}},
         {"agreement",
          {{"agreed", m.agreement.agreed},
           {"labeled", m.agreement.labeled},
           {"rate", m.agreement.rate() ? json(*m.agreement.rate()) : json(nullptr)}}},
         {"integer_pair_fraction", m.integer_pair_fraction ? json(*m.integer_pair_fraction) : json(nullptr)}});
  }
  json dis = json::array();
  for (const auto& [k, v] : b.disagreement.mean_distance) {
    dis.push_back({{"model_a", k.first},
                   {"model_b", k.second},
                   {"mean_distance", v},
                   {"shared_articles", b.disagreement.shared_articles.at(k)}});
  }
  json none = json::array();
  for (const auto& k : b.disagreement.no_shared_articles) none.push_back({k.first, k.second});
  return {{"schema", kSchemaVersion},
          {"run_id", b.run_id},
          {"models", models},
          {"disagreement", dis},
          {"no_shared_articles", none}};
}

}  // namespace compass
