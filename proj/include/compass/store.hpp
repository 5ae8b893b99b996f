#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "compass/error.hpp"
#include "compass/harvester.hpp"
#include "compass/money.hpp"
#include "compass/registry.hpp"
#include "compass/score.hpp"
#include "compass/time.hpp"

namespace compass {

inline constexpr int kSchemaVersion = 1;

struct Evaluation {
  std::string article_id;
  std::string newspaper_id;
  std::string model_id;
  CompassScore score{0, 0};
  std::string raw_text;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  Money cost;
  Timestamp evaluated_at;
  Date batch_day;

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

/// Anonymous score for an article. session_token is the SHA-256 of the
/// client's cookie, never the cookie itself.
struct HumanAssessment {
  std::string article_id;
  CompassScore score{0, 0};
  Timestamp submitted_at;
  std::string session_token;

  friend bool operator==(const HumanAssessment&, const HumanAssessment&) = default;
};

enum class BatchStatus { Complete, Incomplete, Skipped };
std::string_view batch_status_name(BatchStatus s);

/// Outcome of one (day, newspaper, model) daily batch.
struct BatchRecord {
  Date day;
  std::string newspaper_id;
  std::string model_id;
  int got = 0;
  int wanted = 0;
  BatchStatus status = BatchStatus::Complete;
  std::string note;  // why a batch was skipped or came up short

  friend bool operator==(const BatchRecord&, const BatchRecord&) = default;
};

struct RunManifest {
  std::string run_id;
  RunParameters parameters;
  std::vector<std::string> model_ids;
  Timestamp started_at;
  std::optional<Timestamp> finished_at;
  std::uint64_t seed = 0;
  bool dry_run = false;
  std::vector<BatchRecord> batches;
  std::map<std::string, Money> total_cost;
  /// Decoding settings in effect per model; providers' defaults are used.
  std::map<std::string, std::string> decoding;
  /// "<model_id>:<article_id>" evaluated on more than one day.
  std::vector<std::string> repeated_articles;

  bool complete() const;
};

class DuplicateEvaluation : public StorageError {
 public:
  DuplicateEvaluation(const std::string& article_id, const std::string& model_id)
      : StorageError("duplicate evaluation of article " + article_id + " by model " + model_id) {}
};

class UnknownArticle : public Error {
 public:
  explicit UnknownArticle(const std::string& id) : Error("unknown article '" + id + "'") {}
};

class UnknownRun : public Error {
 public:
  explicit UnknownRun(const std::string& id) : Error("unknown run '" + id + "'") {}
};

nlohmann::json to_json(const Evaluation& e);
Evaluation evaluation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ArticleRecord& a);
ArticleRecord article_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HumanAssessment& a);
HumanAssessment assessment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

struct EvaluationFilter {
  std::optional<std::string> newspaper_id;
  std::optional<std::string> model_id;
  std::optional<Date> from;  // inclusive, on batch_day
  std::optional<Date> to;    // inclusive

  bool matches(const Evaluation& e) const;
};

/// One run directory:
///   runs/<run_id>/evaluations.jsonl   articles.jsonl   assessments.jsonl
///   runs/<run_id>/manifest.json
/// JSONL files are append-only. Each append is a single write() under an
/// exclusive flock, so a crash leaves at most one partial trailing line,
/// which readers skip and the next append truncates away.
///
/// Evaluations are unique per (article, model, batch day). The same article
/// may come back on a later day while it stays on a homepage; the pipeline
/// flags those in the manifest.
class RunStore {
 public:
  /// Creates runs/<run_id>; fails if a manifest already exists there.
  static RunStore create(const std::filesystem::path& root, const std::string& run_id);
  /// Opens an existing run, creating it if `create_missing`. Throws UnknownRun.
  static RunStore open(const std::filesystem::path& root, const std::string& run_id, bool create_missing = false);
  static bool valid_run_id(std::string_view id);

  RunStore(RunStore&&) noexcept;
  RunStore& operator=(RunStore&&) = delete;

  const std::string& run_id() const { return run_id_; }
  const std::filesystem::path& dir() const { return dir_; }

  /// All-or-nothing: throws DuplicateEvaluation before writing anything.
  void append_evaluations(std::span<const Evaluation> evals);
  /// Matching evaluations ordered by evaluated_at (stable in file order).
  std::vector<Evaluation> load_evaluations(const EvaluationFilter& filter = {}) const;
  bool has_evaluation(const std::string& article_id, const std::string& model_id, Date day) const;

  /// Article ids already stored are skipped.
  void append_articles(std::span<const ArticleRecord> articles);
  std::vector<ArticleRecord> load_articles() const;
  std::optional<ArticleRecord> find_article(const std::string& id) const;

  /// Throws UnknownArticle if the article is not in this run.
  void record_assessment(const HumanAssessment& a);
  /// One row per (session, article), the latest submission winning.
  std::vector<HumanAssessment> load_assessments() const;

  void write_manifest(const RunManifest& m);
  RunManifest read_manifest() const;
  bool has_manifest() const;

 private:
  RunStore(std::filesystem::path dir, std::string run_id);
  void load_indexes();

  std::filesystem::path dir_;
  std::string run_id_;
  mutable std::mutex mu_;
  std::set<std::tuple<std::string, std::string, std::string>> eval_keys_;  // (article, model, day)
  std::set<std::string> article_ids_;
};

/// Whole JSONL lines of a file; a trailing partial line is ignored.
std::vector<std::string> read_jsonl_lines(const std::filesystem::path& path);
/// Appends complete lines in one locked write.
void append_jsonl_lines(const std::filesystem::path& path, std::span<const std::string> lines);

}  // namespace compass
