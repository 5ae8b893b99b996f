#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "compass/analytics.hpp"
#include "compass/store.hpp"

namespace compass {

struct ModelReport {
  std::string model_id;
  std::size_t evaluations = 0;
  std::vector<NewspaperSummary> summaries;
  std::optional<std::pair<double, double>> global_mean;
  HeatmapGrid heatmap;
  Dispersion economic;
  Dispersion democracy;
  AgreementReport agreement;
  std::optional<double> integer_pair_fraction;
};

struct ReportBundle {
  std::string run_id;
  std::vector<ModelReport> models;  // manifest order, then any others by id
  DisagreementReport disagreement;
  std::vector<std::string> files;   // written by emit_bundle, relative to out_dir
  std::string markdown;
};

struct ReportOptions {
  double centre_band = kDefaultCentreBand;
  std::size_t top_cells = 5;
};

/// Computes every dataset from the run's stored evaluations. Labels come from
/// the run's sources.csv snapshot when present.
ReportBundle build_bundle(const RunStore& store, const ReportOptions& options = {});

/// build_bundle plus the CSV files and report.md in out_dir. Output is a pure
/// function of the store, so re-emitting is byte-identical.
ReportBundle emit_bundle(const RunStore& store, const std::filesystem::path& out_dir, const ReportOptions& options = {});

std::string render_markdown(const ReportBundle& bundle, const ReportOptions& options = {});

/// Compact JSON projection served by the API.
nlohmann::json bundle_json(const ReportBundle& bundle);

/// "35.0%"
std::string format_percent(double fraction);
/// Shortest round-trip decimal.
std::string format_number(double v);

}  // namespace compass
