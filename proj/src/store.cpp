#include "compass/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace compass {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kEvaluations = "evaluations.jsonl";
constexpr const char* kArticles = "articles.jsonl";
constexpr const char* kAssessments = "assessments.jsonl";
constexpr const char* kManifest = "manifest.json";

std::string sys_error(const std::string& what, const fs::path& p) {
  return what + " " + p.string() + ": " + std::strerror(errno);
}

class LockedFile {
 public:
  LockedFile(const fs::path& p, int flags, int lock_kind) : fd_(::open(p.c_str(), flags | O_CLOEXEC, 0644)) {
    if (fd_ < 0) throw StorageError(sys_error("cannot open", p));
    if (::flock(fd_, lock_kind) != 0) {
      ::close(fd_);
      throw StorageError(sys_error("cannot lock", p));
    }
  }
  ~LockedFile() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  LockedFile(const LockedFile&) = delete;
  LockedFile& operator=(const LockedFile&) = delete;
  int fd() const { return fd_; }

 private:
  int fd_;
};

std::string read_all(int fd, const fs::path& p) {
  std::string out;
  char buf[1 << 16];
  for (;;) {
    const ssize_t n = ::pread(fd, buf, sizeof buf, static_cast<off_t>(out.size()));
    if (n < 0) throw StorageError(sys_error("cannot read", p));
    if (n == 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

json parse_line(const std::string& line, const fs::path& p, std::size_t lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw StorageError("corrupt record at " + p.string() + ":" + std::to_string(lineno));
  }
  if (j.value("schema", 0) != kSchemaVersion) {
    throw StorageError("unsupported schema version at " + p.string() + ":" + std::to_string(lineno));
  }
  return j;
}

CompassScore score_from(const json& j) { return CompassScore(j.at("economic").get<double>(), j.at("democracy").get<double>()); }

json params_json(const RunParameters& p) {
  return {{"max_links", p.max_links},           {"select", p.select},
          {"min_chars", p.min_chars},           {"max_chars", p.max_chars},
          {"articles_per_day", p.articles_per_day}, {"days", p.days}};
}

RunParameters params_from(const json& j) {
  RunParameters p;
  p.max_links = j.at("max_links").get<int>();
  p.select = j.at("select").get<int>();
  p.min_chars = j.at("min_chars").get<int>();
  p.max_chars = j.at("max_chars").get<int>();
  p.articles_per_day = j.at("articles_per_day").get<int>();
  p.days = j.at("days").get<int>();
  return p;
}

BatchStatus batch_status_from(std::string_view s) {
  if (s == "complete") return BatchStatus::Complete;
  if (s == "incomplete") return BatchStatus::Incomplete;
  if (s == "skipped") return BatchStatus::Skipped;
  throw StorageError("unknown batch status '" + std::string(s) + "'");
}

template <typename T, typename F>
std::vector<T> load_records(const fs::path& p, F from_json) {
  std::vector<T> out;
  std::size_t lineno = 0;
  for (const auto& line : read_jsonl_lines(p)) {
    ++lineno;
    try {
      out.push_back(from_json(parse_line(line, p, lineno)));
    } catch (const json::exception& e) {
      throw StorageError("bad record at " + p.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const RangeError& e) {
      throw StorageError("bad record at " + p.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string_view batch_status_name(BatchStatus s) {
  switch (s) {
    case BatchStatus::Complete: return "complete";
    case BatchStatus::Incomplete: return "incomplete";
    case BatchStatus::Skipped: return "skipped";
  }
  return "skipped";
}

bool RunManifest::complete() const {
  return std::all_of(batches.begin(), batches.end(),
                     [](const BatchRecord& b) { return b.status == BatchStatus::Complete; });
}

bool EvaluationFilter::matches(const Evaluation& e) const {
  if (newspaper_id && e.newspaper_id != *newspaper_id) return false;
  if (model_id && e.model_id != *model_id) return false;
  if (from && e.batch_day < *from) return false;
  if (to && e.batch_day > *to) return false;
  return true;
}

// -------------------------------------------------------------------- json ---

json to_json(const Evaluation& e) {
  return {{"schema", kSchemaVersion},
          {"article_id", e.article_id},
          {"newspaper_id", e.newspaper_id},
          {"model_id", e.model_id},
          {"economic", e.score.economic()},
          {"democracy", e.score.democracy()},
          {"raw_text", e.raw_text},
          {"input_tokens", e.input_tokens},
          {"output_tokens", e.output_tokens},
          {"cost", e.cost.to_string()},
          {"evaluated_at", format_timestamp(e.evaluated_at)},
          {"batch_day", format_date(e.batch_day)}};
}

Evaluation evaluation_from_json(const json& j) {
  Evaluation e;
  e.article_id = j.at("article_id").get<std::string>();
  e.newspaper_id = j.at("newspaper_id").get<std::string>();
  e.model_id = j.at("model_id").get<std::string>();
  e.score = score_from(j);
  e.raw_text = j.at("raw_text").get<std::string>();
  e.input_tokens = j.at("input_tokens").get<std::int64_t>();
  e.output_tokens = j.at("output_tokens").get<std::int64_t>();
  e.cost = Money::parse(j.at("cost").get<std::string>());
  e.evaluated_at = parse_timestamp(j.at("evaluated_at").get<std::string>());
  e.batch_day = parse_date(j.at("batch_day").get<std::string>());
  return e;
}

json to_json(const ArticleRecord& a) {
  json j = {{"schema", kSchemaVersion},
            {"id", a.id},
            {"newspaper_id", a.newspaper_id},
            {"url", a.url},
            {"title", a.title ? json(*a.title) : json(nullptr)},
            {"body_text", a.body_text},
            {"char_length", a.char_length},
            {"fetched_at", format_timestamp(a.fetched_at)}};
  return j;
}

ArticleRecord article_from_json(const json& j) {
  ArticleRecord a;
  a.id = j.at("id").get<std::string>();
  a.newspaper_id = j.at("newspaper_id").get<std::string>();
  a.url = j.at("url").get<std::string>();
  if (!j.at("title").is_null()) a.title = j.at("title").get<std::string>();
  a.body_text = j.at("body_text").get<std::string>();
  a.char_length = j.at("char_length").get<std::size_t>();
  a.fetched_at = parse_timestamp(j.at("fetched_at").get<std::string>());
  return a;
}

json to_json(const HumanAssessment& a) {
  return {{"schema", kSchemaVersion},
          {"article_id", a.article_id},
          {"economic", a.score.economic()},
          {"democracy", a.score.democracy()},
          {"submitted_at", format_timestamp(a.submitted_at)},
          {"session_token", a.session_token}};
}

HumanAssessment assessment_from_json(const json& j) {
  HumanAssessment a;
  a.article_id = j.at("article_id").get<std::string>();
  a.score = score_from(j);
  a.submitted_at = parse_timestamp(j.at("submitted_at").get<std::string>());
  a.session_token = j.at("session_token").get<std::string>();
  return a;
}

json to_json(const RunManifest& m) {
  json batches = json::array();
  for (const auto& b : m.batches) {
    batches.push_back({{"day", format_date(b.day)},
                       {"newspaper_id", b.newspaper_id},
                       {"model_id", b.model_id},
                       {"got", b.got},
                       {"wanted", b.wanted},
                       {"status", batch_status_name(b.status)},
                       {"note", b.note}});
  }
  json cost = json::object();
  for (const auto& [model, amount] : m.total_cost) cost[model] = amount.to_string();
  return {{"schema", kSchemaVersion},
          {"run_id", m.run_id},
          {"parameters", params_json(m.parameters)},
          {"model_ids", m.model_ids},
          {"started_at", format_timestamp(m.started_at)},
          {"finished_at", m.finished_at ? json(format_timestamp(*m.finished_at)) : json(nullptr)},
          {"seed", m.seed},
          {"dry_run", m.dry_run},
          {"status", m.dry_run ? "dry-run" : m.complete() ? "complete" : "incomplete"},
          {"batches", batches},
          {"total_cost", cost},
          {"decoding", m.decoding},
          {"repeated_articles", m.repeated_articles}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.parameters = params_from(j.at("parameters"));
  m.model_ids = j.at("model_ids").get<std::vector<std::string>>();
  m.started_at = parse_timestamp(j.at("started_at").get<std::string>());
  if (!j.at("finished_at").is_null()) m.finished_at = parse_timestamp(j.at("finished_at").get<std::string>());
  m.seed = j.at("seed").get<std::uint64_t>();
  m.dry_run = j.at("dry_run").get<bool>();
  for (const auto& b : j.at("batches")) {
    BatchRecord r;
    r.day = parse_date(b.at("day").get<std::string>());
    r.newspaper_id = b.at("newspaper_id").get<std::string>();
    r.model_id = b.at("model_id").get<std::string>();
    r.got = b.at("got").get<int>();
    r.wanted = b.at("wanted").get<int>();
    r.status = batch_status_from(b.at("status").get<std::string>());
    r.note = b.at("note").get<std::string>();
    m.batches.push_back(std::move(r));
  }
  for (const auto& [model, amount] : j.at("total_cost").items()) m.total_cost[model] = Money::parse(amount.get<std::string>());
  m.decoding = j.at("decoding").get<std::map<std::string, std::string>>();
  m.repeated_articles = j.at("repeated_articles").get<std::vector<std::string>>();
  return m;
}

// ------------------------------------------------------------------- jsonl ---

std::vector<std::string> read_jsonl_lines(const fs::path& path) {
  std::vector<std::string> out;
  if (!fs::exists(path)) return out;
  std::string data;
  {
    LockedFile f(path, O_RDONLY, LOCK_SH);
    data = read_all(f.fd(), path);
  }
  std::size_t start = 0;
  for (;;) {
    const auto nl = data.find('\n', start);
    if (nl == std::string::npos) break;  // trailing partial record, if any
    if (nl > start) out.push_back(data.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

void append_jsonl_lines(const fs::path& path, std::span<const std::string> lines) {
  if (lines.empty()) return;
  std::string buf;
  for (const auto& l : lines) {
    buf += l;
    buf.push_back('\n');
  }
  LockedFile f(path, O_RDWR | O_CREAT, LOCK_EX);
  // Drop a partial record left by an interrupted writer.
  const off_t size = ::lseek(f.fd(), 0, SEEK_END);
  if (size > 0) {
    char last = 0;
    if (::pread(f.fd(), &last, 1, size - 1) != 1) throw StorageError(sys_error("cannot read", path));
    if (last != '\n') {
      const std::string data = read_all(f.fd(), path);
      const auto nl = data.rfind('\n');
      const off_t keep = nl == std::string::npos ? 0 : static_cast<off_t>(nl + 1);
      if (::ftruncate(f.fd(), keep) != 0) throw StorageError(sys_error("cannot truncate", path));
    }
  }
  off_t offset = ::lseek(f.fd(), 0, SEEK_END);
  std::size_t written = 0;
  while (written < buf.size()) {
    const ssize_t n = ::pwrite(f.fd(), buf.data() + written, buf.size() - written, offset);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StorageError(sys_error("cannot write", path));
    }
    written += static_cast<std::size_t>(n);
    offset += n;
  }
  if (::fsync(f.fd()) != 0) throw StorageError(sys_error("cannot sync", path));
}

// ------------------------------------------------------------------- store ---

bool RunStore::valid_run_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
           c == '.';
  });
}

RunStore::RunStore(fs::path dir, std::string run_id) : dir_(std::move(dir)), run_id_(std::move(run_id)) {}

RunStore::RunStore(RunStore&& o) noexcept
    : dir_(std::move(o.dir_)),
      run_id_(std::move(o.run_id_)),
      eval_keys_(std::move(o.eval_keys_)),
      article_ids_(std::move(o.article_ids_)) {}

RunStore RunStore::create(const fs::path& root, const std::string& run_id) {
  if (!valid_run_id(run_id)) throw StorageError("invalid run id '" + run_id + "'");
  const fs::path dir = root / run_id;
  if (fs::exists(dir / kManifest)) throw StorageError("run already exists: " + dir.string());
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StorageError("cannot create " + dir.string() + ": " + ec.message());
  RunStore s(dir, run_id);
  s.load_indexes();
  return s;
}

RunStore RunStore::open(const fs::path& root, const std::string& run_id, bool create_missing) {
  if (!valid_run_id(run_id)) throw UnknownRun(run_id);
  const fs::path dir = root / run_id;
  if (!fs::is_directory(dir)) {
    if (!create_missing) throw UnknownRun(run_id);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StorageError("cannot create " + dir.string() + ": " + ec.message());
  }
  RunStore s(dir, run_id);
  s.load_indexes();
  return s;
}

void RunStore::load_indexes() {
  for (const auto& e : load_records<Evaluation>(dir_ / kEvaluations, evaluation_from_json)) {
    eval_keys_.emplace(e.article_id, e.model_id, format_date(e.batch_day));
  }
  for (const auto& line : read_jsonl_lines(dir_ / kArticles)) {
    const json j = json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("id")) article_ids_.insert(j["id"].get<std::string>());
  }
}

void RunStore::append_evaluations(std::span<const Evaluation> evals) {
  std::lock_guard lock(mu_);
  std::set<std::tuple<std::string, std::string, std::string>> batch;
  std::vector<std::string> lines;
  for (const auto& e : evals) {
    auto k = std::make_tuple(e.article_id, e.model_id, format_date(e.batch_day));
    if (eval_keys_.count(k) || !batch.insert(k).second) throw DuplicateEvaluation(e.article_id, e.model_id);
    lines.push_back(to_json(e).dump());
  }
  append_jsonl_lines(dir_ / kEvaluations, lines);
  eval_keys_.merge(batch);
}

std::vector<Evaluation> RunStore::load_evaluations(const EvaluationFilter& filter) const {
  std::vector<Evaluation> out;
  for (auto& e : load_records<Evaluation>(dir_ / kEvaluations, evaluation_from_json)) {
    if (filter.matches(e)) out.push_back(std::move(e));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Evaluation& a, const Evaluation& b) { return a.evaluated_at < b.evaluated_at; });
  return out;
}

bool RunStore::has_evaluation(const std::string& article_id, const std::string& model_id, Date day) const {
  std::lock_guard lock(mu_);
  return eval_keys_.count({article_id, model_id, format_date(day)}) > 0;
}

void RunStore::append_articles(std::span<const ArticleRecord> articles) {
  std::lock_guard lock(mu_);
  std::vector<std::string> lines;
  std::set<std::string> added;
  for (const auto& a : articles) {
    if (article_ids_.count(a.id) || !added.insert(a.id).second) continue;
    lines.push_back(to_json(a).dump());
  }
  append_jsonl_lines(dir_ / kArticles, lines);
  article_ids_.merge(added);
}

std::vector<ArticleRecord> RunStore::load_articles() const {
  return load_records<ArticleRecord>(dir_ / kArticles, article_from_json);
}

std::optional<ArticleRecord> RunStore::find_article(const std::string& id) const {
  {
    std::lock_guard lock(mu_);
    if (!article_ids_.count(id)) return std::nullopt;
  }
  for (auto& a : load_articles()) {
    if (a.id == id) return std::move(a);
  }
  return std::nullopt;
}

void RunStore::record_assessment(const HumanAssessment& a) {
  std::lock_guard lock(mu_);
  if (!article_ids_.count(a.article_id)) throw UnknownArticle(a.article_id);
  const std::string line = to_json(a).dump();
  append_jsonl_lines(dir_ / kAssessments, std::span<const std::string>(&line, 1));
}

std::vector<HumanAssessment> RunStore::load_assessments() const {
  std::vector<HumanAssessment> out;
  std::map<std::pair<std::string, std::string>, std::size_t> slot;
  for (auto& a : load_records<HumanAssessment>(dir_ / kAssessments, assessment_from_json)) {
    auto [it, inserted] = slot.try_emplace({a.session_token, a.article_id}, out.size());
    if (inserted) {
      out.push_back(std::move(a));
    } else {
      out[it->second] = std::move(a);
    }
  }
  return out;
}

void RunStore::write_manifest(const RunManifest& m) {
  std::lock_guard lock(mu_);
  const fs::path tmp = dir_ / (std::string(kManifest) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << to_json(m).dump(2) << '\n';
    if (!out) throw StorageError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, dir_ / kManifest, ec);
  if (ec) throw StorageError("cannot replace manifest in " + dir_.string() + ": " + ec.message());
}

RunManifest RunStore::read_manifest() const {
  std::ifstream in(dir_ / kManifest, std::ios::binary);
  if (!in) throw StorageError("run " + run_id_ + " has no manifest");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return manifest_from_json(json::parse(ss.str()));
  } catch (const json::exception& e) {
    throw StorageError("corrupt manifest in " + dir_.string() + ": " + e.what());
  }
}

bool RunStore::has_manifest() const { return fs::exists(dir_ / kManifest); }

}  // namespace compass
