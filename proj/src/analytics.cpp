#include "compass/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace compass {
namespace {

void require_one_model(std::span<const Evaluation> evals) {
  for (const auto& e : evals) {
    if (e.model_id != evals.front().model_id) throw MixedModels(evals.front().model_id, e.model_id);
  }
}

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

std::optional<double> sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return std::nullopt;
  const double m = mean_of(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::vector<NewspaperSummary> newspaper_means(std::span<const Evaluation> evals) {
  require_one_model(evals);
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& e : evals) {
    auto& g = groups[e.newspaper_id];
    g.first.push_back(e.score.economic());
    g.second.push_back(e.score.democracy());
  }
  std::vector<NewspaperSummary> out;
  for (const auto& [id, g] : groups) {
    NewspaperSummary s;
    s.newspaper_id = id;
    s.model_id = evals.front().model_id;
    s.n = g.first.size();
    s.mean_economic = mean_of(g.first);
    s.mean_democracy = mean_of(g.second);
    s.std_economic = sample_stddev(g.first);
    s.std_democracy = sample_stddev(g.second);
    out.push_back(std::move(s));
  }
  return out;
}

std::pair<double, double> global_mean(std::span<const NewspaperSummary> summaries) {
  if (summaries.empty()) throw EmptyInput("global mean of no newspapers");
  double e = 0, d = 0;
  for (const auto& s : summaries) {
    if (s.model_id != summaries.front().model_id) throw MixedModels(summaries.front().model_id, s.model_id);
    e += s.mean_economic;
    d += s.mean_democracy;
  }
  const auto n = static_cast<double>(summaries.size());
  return {e / n, d / n};
}

// ---------------------------------------------------------------- heatmap ---

std::size_t HeatmapGrid::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

std::size_t HeatmapGrid::max_count() const {
  std::size_t m = 0;
  for (const auto& row : counts) m = std::max(m, *std::max_element(row.begin(), row.end()));
  return m;
}

std::vector<HeatmapGrid::Cell> HeatmapGrid::top_cells(std::size_t k) const {
  std::vector<Cell> cells;
  for (int e = -10; e <= 10; ++e) {
    for (int d = -10; d <= 10; ++d) {
      if (at(e, d) > 0) cells.push_back({e, d, at(e, d)});
    }
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.count > b.count; });
  if (cells.size() > k) cells.resize(k);
  return cells;
}

HeatmapGrid heatmap(std::span<const Evaluation> evals) {
  require_one_model(evals);
  HeatmapGrid g;
  if (!evals.empty()) g.model_id = evals.front().model_id;
  for (const auto& e : evals) {
    const auto [x, y] = score_to_bin(e.score);
    ++g.at(x, y);
  }
  return g;
}

// ------------------------------------------------------------- dispersion ---

double quantile(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

FiveNumberSummary five_number_summary(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("five-number summary of no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return {v.front(), quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75), v.back()};
}

Dispersion dispersion_distribution(std::span<const NewspaperSummary> summaries, Axis axis) {
  Dispersion d;
  for (const auto& s : summaries) {
    if (auto v = s.stddev(axis)) d.values.push_back(*v);
  }
  if (d.values.empty()) return d;
  d.summary = five_number_summary(d.values);
  const double iqr = d.summary->q3 - d.summary->q1;
  d.lower_fence = d.summary->q1 - 1.5 * iqr;
  d.upper_fence = d.summary->q3 + 1.5 * iqr;
  for (double v : d.values) {
    if (v < d.lower_fence || v > d.upper_fence) d.outliers.push_back(v);
  }
  std::sort(d.outliers.begin(), d.outliers.end());
  return d;
}

// ----------------------------------------------------------- disagreement ---

std::optional<double> DisagreementReport::between(const std::string& a, const std::string& b) const {
  if (a == b) return 0.0;
  auto it = mean_distance.find(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
  if (it == mean_distance.end()) return std::nullopt;
  return it->second;
}

DisagreementReport pairwise_model_disagreement(const std::map<std::string, std::vector<Evaluation>>& evals_by_model) {
  // Per model, per article: mean score.
  std::map<std::string, std::map<std::string, std::pair<double, double>>> points;
  for (const auto& [model, evals] : evals_by_model) {
    std::map<std::string, std::tuple<double, double, int>> acc;
    for (const auto& e : evals) {
      auto& [x, y, n] = acc[e.article_id];
      x += e.score.economic();
      y += e.score.democracy();
      ++n;
    }
    auto& out = points[model];
    for (const auto& [id, t] : acc) {
      const auto& [x, y, n] = t;
      out[id] = {x / n, y / n};
    }
  }

  DisagreementReport r;
  for (auto a = points.begin(); a != points.end(); ++a) {
    for (auto b = std::next(a); b != points.end(); ++b) {
      double sum = 0;
      std::size_t shared = 0;
      for (const auto& [id, pa] : a->second) {
        auto it = b->second.find(id);
        if (it == b->second.end()) continue;
        sum += std::hypot(pa.first - it->second.first, pa.second - it->second.second);
        ++shared;
      }
      const auto key = std::make_pair(a->first, b->first);
      if (shared == 0) {
        r.no_shared_articles.push_back(key);
        continue;
      }
      r.mean_distance[key] = sum / static_cast<double>(shared);
      r.shared_articles[key] = shared;
    }
  }
  return r;
}

// -------------------------------------------------------------- agreement ---

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Agree: return "agree";
    case Verdict::Disagree: return "disagree";
    case Verdict::Excluded: return "excluded";
  }
  return "excluded";
}

AgreementReport sign_agreement_with_labels(std::span<const NewspaperSummary> summaries,
                                           std::span<const NewspaperSource> sources, double centre_band) {
  std::map<std::string, PositioningLabel> labels;
  for (const auto& s : sources) labels[s.id] = s.positioning;

  AgreementReport r;
  if (!summaries.empty()) r.model_id = summaries.front().model_id;
  for (const auto& s : summaries) {
    AgreementRow row;
    row.newspaper_id = s.newspaper_id;
    row.mean_economic = s.mean_economic;
    auto it = labels.find(s.newspaper_id);
    if (it != labels.end()) {
      row.label = it->second;
      const double m = s.mean_economic;
      switch (row.label) {
        case PositioningLabel::Left:
        case PositioningLabel::CentreLeft: row.verdict = m < 0 ? Verdict::Agree : Verdict::Disagree; break;
        case PositioningLabel::Right:
        case PositioningLabel::CentreRight: row.verdict = m > 0 ? Verdict::Agree : Verdict::Disagree; break;
        case PositioningLabel::Centre:
          row.verdict = std::abs(m) <= centre_band ? Verdict::Agree : Verdict::Disagree;
          break;
        case PositioningLabel::Independent:
        case PositioningLabel::Unknown: row.verdict = Verdict::Excluded; break;
      }
    }
    if (row.verdict != Verdict::Excluded) {
      ++r.labeled;
      if (row.verdict == Verdict::Agree) ++r.agreed;
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

std::optional<double> integer_pair_fraction(std::span<const Evaluation> evals) {
  if (evals.empty()) return std::nullopt;
  const auto n = std::count_if(evals.begin(), evals.end(), [](const Evaluation& e) { return e.score.is_integer_pair(); });
  return static_cast<double>(n) / static_cast<double>(evals.size());
}

std::map<std::string, std::vector<Evaluation>> by_model(std::span<const Evaluation> evals) {
  std::map<std::string, std::vector<Evaluation>> out;
  for (const auto& e : evals) out[e.model_id].push_back(e);
  return out;
}

}  // namespace compass
