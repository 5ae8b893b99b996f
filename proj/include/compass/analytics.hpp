#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "compass/error.hpp"
#include "compass/registry.hpp"
#include "compass/score.hpp"
#include "compass/store.hpp"

namespace compass {

class MixedModels : public Error {
 public:
  MixedModels(const std::string& a, const std::string& b)
      : Error("evaluations from more than one model ('" + a + "', '" + b + "')") {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error(what) {}
};

struct NewspaperSummary {
  std::string newspaper_id;
  std::string model_id;
  std::size_t n = 0;
  double mean_economic = 0;
  double mean_democracy = 0;
  std::optional<double> std_economic;  // sample std, present when n >= 2
  std::optional<double> std_democracy;

  double mean(Axis a) const { return a == Axis::Economic ? mean_economic : mean_democracy; }
  std::optional<double> stddev(Axis a) const { return a == Axis::Economic ? std_economic : std_democracy; }
};

/// Sample standard deviation (divisor n - 1); nullopt when fewer than two values.
std::optional<double> sample_stddev(std::span<const double> xs);

/// One summary per newspaper, ordered by newspaper id. Throws MixedModels.
std::vector<NewspaperSummary> newspaper_means(std::span<const Evaluation> evals);

/// Unweighted mean of the newspaper means. Throws EmptyInput or MixedModels.
std::pair<double, double> global_mean(std::span<const NewspaperSummary> summaries);

/// Raw counts on the 21x21 integer grid; index 0 is -10.
struct HeatmapGrid {
  static constexpr int kBins = 21;
  static constexpr std::size_t kLogScaleThreshold = 100;

  std::string model_id;
  std::array<std::array<std::size_t, kBins>, kBins> counts{};  // [economic][democracy]

  std::size_t& at(int economic_bin, int democracy_bin) { return counts[economic_bin + 10][democracy_bin + 10]; }
  std::size_t at(int economic_bin, int democracy_bin) const { return counts[economic_bin + 10][democracy_bin + 10]; }
  std::size_t total() const;
  std::size_t max_count() const;
  /// True when some cell exceeds kLogScaleThreshold, where a linear colour
  /// scale would wash out everything else.
  bool log_scale_advised() const { return max_count() > kLogScaleThreshold; }

  struct Cell {
    int economic;
    int democracy;
    std::size_t count;
  };
  /// Non-empty cells by descending count, ties by (economic, democracy).
  std::vector<Cell> top_cells(std::size_t k) const;
};

/// Throws MixedModels.
HeatmapGrid heatmap(std::span<const Evaluation> evals);

struct FiveNumberSummary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

/// Linear interpolation between order statistics: position p * (n - 1).
/// `sorted` must be ascending and non-empty.
double quantile(std::span<const double> sorted, double p);
/// Throws EmptyInput.
FiveNumberSummary five_number_summary(std::span<const double> values);

struct Dispersion {
  std::vector<double> values;  // in summary order
  std::optional<FiveNumberSummary> summary;
  double lower_fence = 0;  // Q1 - 1.5 IQR
  double upper_fence = 0;  // Q3 + 1.5 IQR
  std::vector<double> outliers;  // ascending
};

/// Per-newspaper std values on one axis (absent ones dropped) with their
/// boxplot statistics and Tukey outliers.
Dispersion dispersion_distribution(std::span<const NewspaperSummary> summaries, Axis axis);

struct DisagreementReport {
  /// Keyed by (a, b) with a < b.
  std::map<std::pair<std::string, std::string>, double> mean_distance;
  std::map<std::pair<std::string, std::string>, std::size_t> shared_articles;
  /// Pairs with no article in common (NoSharedArticles), reported not thrown.
  std::vector<std::pair<std::string, std::string>> no_shared_articles;

  /// Symmetric lookup; a model against itself is 0.
  std::optional<double> between(const std::string& a, const std::string& b) const;
};

/// Mean Euclidean distance between two models' scores over the articles both
/// evaluated. An article a model scored more than once contributes the mean
/// of its scores.
DisagreementReport pairwise_model_disagreement(const std::map<std::string, std::vector<Evaluation>>& evals_by_model);

enum class Verdict { Agree, Disagree, Excluded };
std::string_view verdict_name(Verdict v);

struct AgreementRow {
  std::string newspaper_id;
  PositioningLabel label = PositioningLabel::Unknown;
  double mean_economic = 0;
  Verdict verdict = Verdict::Excluded;
};

struct AgreementReport {
  std::string model_id;
  std::vector<AgreementRow> rows;
  std::size_t agreed = 0;
  std::size_t labeled = 0;  // rows not excluded
  std::optional<double> rate() const {
    if (labeled == 0) return std::nullopt;
    return static_cast<double>(agreed) / static_cast<double>(labeled);
  }
};

inline constexpr double kDefaultCentreBand = 2.0;

/// Economic-sign check against declared labels: left family must be < 0,
/// right family > 0, Centre within +-centre_band; Independent and Unknown
/// are excluded. Newspapers missing from `sources` are excluded too.
AgreementReport sign_agreement_with_labels(std::span<const NewspaperSummary> summaries,
                                           std::span<const NewspaperSource> sources,
                                           double centre_band = kDefaultCentreBand);

/// Share of evaluations whose score is an integer pair; nullopt when empty.
std::optional<double> integer_pair_fraction(std::span<const Evaluation> evals);

/// Evaluations grouped by model id.
std::map<std::string, std::vector<Evaluation>> by_model(std::span<const Evaluation> evals);

}  // namespace compass
