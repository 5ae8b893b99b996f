#include <doctest.h>

#include <cmath>
#include <random>

#include "compass/analytics.hpp"
#include "support.hpp"

using namespace compass;
using testsupport::make_eval;

namespace {

std::vector<Evaluation> random_evals(std::mt19937_64& rng, const std::string& model, int papers, int per_paper) {
  std::uniform_int_distribution<int> v(-10, 10);
  std::vector<Evaluation> out;
  for (int p = 0; p < papers; ++p) {
    for (int i = 0; i < per_paper; ++i) {
      out.push_back(make_eval("art-" + std::to_string(p) + "-" + std::to_string(i), "paper-" + std::to_string(p),
                              model, v(rng), v(rng)));
    }
  }
  return out;
}

std::vector<Evaluation> shifted(std::vector<Evaluation> evals, double de, double dd) {
  for (auto& e : evals) e.score = CompassScore(e.score.economic() + de, e.score.democracy() + dd);
  return evals;
}

}  // namespace

TEST_CASE("single evaluation: mean is the score, std absent") {
  const auto s = newspaper_means(std::vector{make_eval("a", "p", "m", 0, 0)});
  REQUIRE(s.size() == 1);
  CHECK(s[0].mean_economic == 0);
  CHECK_FALSE(s[0].std_economic);
  CHECK_FALSE(s[0].std_democracy);
}

TEST_CASE("two opposite corners: sample std is sqrt(200)") {
  const auto s = newspaper_means(std::vector{make_eval("a", "p", "m", -10, -10), make_eval("b", "p", "m", 10, 10)});
  REQUIRE(s.size() == 1);
  CHECK(s[0].mean_economic == 0);
  CHECK(s[0].mean_democracy == 0);
  CHECK(std::abs(*s[0].std_economic - std::sqrt(200.0)) < 1e-9);
  CHECK(std::abs(*s[0].std_democracy - std::sqrt(200.0)) < 1e-9);
}

TEST_CASE("means equal an independent summation") {
  std::mt19937_64 rng(11);
  const auto evals = random_evals(rng, "mock", 40, 25);
  const auto sums = newspaper_means(evals);
  REQUIRE(sums.size() == 40);
  for (const auto& s : sums) {
    double se = 0, sd = 0;
    int n = 0;
    for (const auto& e : evals) {
      if (e.newspaper_id != s.newspaper_id) continue;
      se += e.score.economic();
      sd += e.score.democracy();
      ++n;
    }
    CHECK(s.n == 25);
    CHECK(std::abs(s.mean_economic - se / n) < 1e-9);
    CHECK(std::abs(s.mean_democracy - sd / n) < 1e-9);
  }
  double ge = 0, gd = 0;
  for (const auto& s : sums) {
    ge += s.mean_economic;
    gd += s.mean_democracy;
  }
  const auto g = global_mean(sums);
  CHECK(std::abs(g.first - ge / 40) < 1e-9);
  CHECK(std::abs(g.second - gd / 40) < 1e-9);
}

TEST_CASE("global mean counts each newspaper once") {
  NewspaperSummary a, b;
  a.mean_economic = -10;
  b.mean_economic = 10;
  a.n = 1;
  b.n = 100;
  CHECK(global_mean(std::vector{a, b}) == std::pair{0.0, 0.0});
  NewspaperSummary c;
  c.mean_economic = 3;
  c.mean_democracy = -2;
  CHECK(global_mean(std::vector{c}) == std::pair{3.0, -2.0});
  CHECK_THROWS_AS(global_mean(std::vector<NewspaperSummary>{}), EmptyInput);
}

TEST_CASE("mixed models are refused") {
  const std::vector evals{make_eval("a", "p", "m1", 0, 0), make_eval("b", "p", "m2", 0, 0)};
  CHECK_THROWS_AS(newspaper_means(evals), MixedModels);
  CHECK_THROWS_AS(heatmap(evals), MixedModels);
}

TEST_CASE("heatmap counts and the 35 percent cell") {
  std::vector<Evaluation> evals;
  for (int i = 0; i < 1000; ++i) {
    const bool corner = i < 350;
    evals.push_back(make_eval("a" + std::to_string(i), "p", "m", corner ? -10 : 2, corner ? -10 : 3));
  }
  const auto grid = heatmap(evals);
  CHECK(grid.total() == 1000);
  CHECK(grid.at(-10, -10) == 350);
  CHECK(grid.at(-10, -10) / double(grid.total()) == doctest::Approx(0.35));
  CHECK(grid.log_scale_advised());
  const auto top = grid.top_cells(5);
  REQUIRE(top.size() == 2);
  CHECK(top[0].economic == 2);
  CHECK(top[1].count == 350);
}

TEST_CASE("heatmap edge cases") {
  const auto empty = heatmap(std::vector<Evaluation>{});
  CHECK(empty.total() == 0);
  CHECK(empty.max_count() == 0);
  CHECK_FALSE(empty.log_scale_advised());
  std::vector<Evaluation> hundred;
  for (int i = 0; i < 100; ++i) hundred.push_back(make_eval("a" + std::to_string(i), "p", "m", 0, 0));
  CHECK_FALSE(heatmap(hundred).log_scale_advised());
  hundred.push_back(make_eval("extra", "p", "m", 0, 0));
  CHECK(heatmap(hundred).log_scale_advised());
  // Half-integers land in the bin away from zero.
  CHECK(heatmap(std::vector{make_eval("h", "p", "m", 0.5, -0.5)}).at(1, -1) == 1);
}

TEST_CASE("heatmap is invariant under input permutation") {
  std::mt19937_64 rng(3);
  auto evals = random_evals(rng, "m", 5, 40);
  const auto a = heatmap(evals);
  std::shuffle(evals.begin(), evals.end(), rng);
  CHECK(heatmap(evals).counts == a.counts);
}

TEST_CASE("top cells order ties by coordinates") {
  const auto grid = heatmap(std::vector{make_eval("a", "p", "m", 1, 1), make_eval("b", "p", "m", -1, 1),
                                        make_eval("c", "p", "m", 1, -1)});
  const auto top = grid.top_cells(2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].economic == -1);
  CHECK(top[1].economic == 1);
  CHECK(top[1].democracy == -1);
}

TEST_CASE("quantiles interpolate linearly") {
  const std::vector<double> xs{1, 2, 3, 4, 100};
  CHECK(quantile(xs, 0.25) == 2);
  CHECK(quantile(xs, 0.5) == 3);
  CHECK(quantile(xs, 0.75) == 4);
  const std::vector<double> ys{1, 2, 3, 4};
  CHECK(quantile(ys, 0.25) == doctest::Approx(1.75));
  const auto f = five_number_summary(std::vector<double>{4, 1, 100, 3, 2});
  CHECK(f.min == 1);
  CHECK(f.max == 100);
  CHECK(f.median == 3);
  CHECK_THROWS_AS(five_number_summary(std::vector<double>{}), EmptyInput);
}

TEST_CASE("dispersion: Tukey outlier at 100") {
  std::vector<NewspaperSummary> sums;
  for (double s : {1.0, 2.0, 3.0, 4.0, 100.0}) {
    NewspaperSummary n;
    n.std_economic = s;
    sums.push_back(n);
  }
  NewspaperSummary absent;
  sums.push_back(absent);
  const auto d = dispersion_distribution(sums, Axis::Economic);
  CHECK(d.values.size() == 5);
  REQUIRE(d.summary);
  CHECK(d.summary->q1 == 2);
  CHECK(d.summary->q3 == 4);
  CHECK(d.upper_fence == 7);
  CHECK(d.lower_fence == -1);
  CHECK(d.outliers == std::vector<double>{100});
  CHECK_FALSE(dispersion_distribution(sums, Axis::Democracy).summary);
}

TEST_CASE("constant scores give zero dispersion") {
  std::vector<Evaluation> evals;
  for (int p = 0; p < 4; ++p) {
    for (int i = 0; i < 3; ++i) evals.push_back(make_eval(std::to_string(p * 10 + i), "p" + std::to_string(p), "m", 4, -4));
  }
  const auto d = dispersion_distribution(newspaper_means(evals), Axis::Democracy);
  REQUIRE(d.summary);
  CHECK(d.summary->min == 0);
  CHECK(d.summary->max == 0);
  CHECK(d.outliers.empty());
}

TEST_CASE("disagreement: identical models 0, corner model 10 sqrt 2") {
  std::map<std::string, std::vector<Evaluation>> m;
  for (int i = 0; i < 10; ++i) {
    const std::string id = "a" + std::to_string(i);
    m["centre"].push_back(make_eval(id, "p", "centre", 0, 0));
    m["copy"].push_back(make_eval(id, "p", "copy", 0, 0));
    m["corner"].push_back(make_eval(id, "p", "corner", -10, -10));
  }
  const auto r = pairwise_model_disagreement(m);
  CHECK(r.mean_distance.size() == 3);
  CHECK(*r.between("centre", "copy") == 0);
  CHECK(std::abs(*r.between("centre", "corner") - 10 * std::sqrt(2.0)) < 1e-9);
  CHECK(r.between("corner", "centre") == r.between("centre", "corner"));
  CHECK(r.between("corner", "corner") == 0.0);
  CHECK(r.shared_articles.at({"centre", "corner"}) == 10);
}

TEST_CASE("disagreement reports pairs with nothing shared") {
  std::map<std::string, std::vector<Evaluation>> m;
  m["x"].push_back(make_eval("a", "p", "x", 0, 0));
  m["y"].push_back(make_eval("b", "p", "y", 0, 0));
  const auto r = pairwise_model_disagreement(m);
  CHECK(r.mean_distance.empty());
  REQUIRE(r.no_shared_articles.size() == 1);
  CHECK(r.no_shared_articles[0] == std::pair<std::string, std::string>{"x", "y"});
  CHECK_FALSE(r.between("x", "y"));
}

TEST_CASE("disagreement is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> v(-10, 10);
  for (int round = 0; round < 20; ++round) {
    std::map<std::string, std::vector<Evaluation>> m;
    for (int i = 0; i < 30; ++i) {
      for (const char* model : {"a", "b", "c"}) {
        m[model].push_back(make_eval("art" + std::to_string(i), "p", model, v(rng), v(rng)));
      }
    }
    const auto r = pairwise_model_disagreement(m);
    const double ab = *r.between("a", "b"), bc = *r.between("b", "c"), ac = *r.between("a", "c");
    CHECK(ab == *r.between("b", "a"));
    CHECK(ac <= ab + bc + 1e-12);
    CHECK(ab <= ac + bc + 1e-12);
    CHECK(bc <= ab + ac + 1e-12);
  }
}

TEST_CASE("translation shifts means and leaves spread and disagreement alone") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> v(-7, 7);
  std::vector<Evaluation> a, b;
  for (int p = 0; p < 6; ++p) {
    for (int i = 0; i < 5; ++i) {
      const std::string id = std::to_string(p) + "-" + std::to_string(i);
      a.push_back(make_eval(id, "p" + std::to_string(p), "a", v(rng), v(rng)));
      b.push_back(make_eval(id, "p" + std::to_string(p), "b", v(rng), v(rng)));
    }
  }
  const auto a2 = shifted(a, 3, -2), b2 = shifted(b, 3, -2);
  const auto before = newspaper_means(a), after = newspaper_means(a2);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(std::abs(after[i].mean_economic - (before[i].mean_economic + 3)) < 1e-9);
    CHECK(std::abs(after[i].mean_democracy - (before[i].mean_democracy - 2)) < 1e-9);
    CHECK(std::abs(*after[i].std_economic - *before[i].std_economic) < 1e-9);
    CHECK(std::abs(*after[i].std_democracy - *before[i].std_democracy) < 1e-9);
  }
  const auto d1 = pairwise_model_disagreement({{"a", a}, {"b", b}});
  const auto d2 = pairwise_model_disagreement({{"a", a2}, {"b", b2}});
  CHECK(std::abs(*d1.between("a", "b") - *d2.between("a", "b")) < 1e-9);
}

TEST_CASE("label agreement") {
  auto summary = [](const std::string& id, double e) {
    NewspaperSummary s;
    s.newspaper_id = id;
    s.mean_economic = e;
    return s;
  };
  auto source = [](const std::string& id, PositioningLabel l) {
    NewspaperSource s;
    s.id = id;
    s.positioning = l;
    return s;
  };
  const std::vector sums{summary("r", 4), summary("c", 0), summary("l", 1), summary("i", 5), summary("ghost", 1)};
  const std::vector srcs{source("r", PositioningLabel::Right), source("c", PositioningLabel::Centre),
                         source("l", PositioningLabel::Left), source("i", PositioningLabel::Independent)};
  const auto r = sign_agreement_with_labels(sums, srcs);
  CHECK(r.labeled == 3);
  CHECK(r.agreed == 2);
  for (const auto& row : r.rows) {
    if (row.newspaper_id == "l") CHECK(row.verdict == Verdict::Disagree);
    if (row.newspaper_id == "i") CHECK(row.verdict == Verdict::Excluded);
    if (row.newspaper_id == "ghost") CHECK(row.verdict == Verdict::Excluded);
  }
  CHECK_FALSE(sign_agreement_with_labels({}, srcs).rate());
}

TEST_CASE("an all-left model agrees on a third of the shipped registry") {
  const auto sources = load_registry(testsupport::source_dir() / "data" / "sources.csv");
  std::vector<Evaluation> evals;
  for (const auto& s : sources) evals.push_back(make_eval("a-" + s.id, s.id, "left", -10, -10));
  const auto r = sign_agreement_with_labels(newspaper_means(evals), sources);
  CHECK(r.labeled == 30);
  CHECK(r.agreed == 10);
  CHECK(*r.rate() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("integer pair fraction and grouping") {
  CHECK_FALSE(integer_pair_fraction(std::vector<Evaluation>{}));
  const std::vector evals{make_eval("a", "p", "m1", 1, 1), make_eval("b", "p", "m2", 0.5, 1)};
  CHECK(*integer_pair_fraction(evals) == 0.5);
  const auto g = by_model(evals);
  CHECK(g.size() == 2);
  CHECK(g.at("m1").size() == 1);
  CHECK(sample_stddev(std::vector<double>{5}) == std::nullopt);
}
