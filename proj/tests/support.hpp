#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "compass/gateway.hpp"
#include "compass/store.hpp"
#include "compass/time.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path source_dir() { return fs::path(COMPASS_SOURCE_DIR); }
inline fs::path fixtures() { return source_dir() / "fixtures"; }

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("compass-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline compass::Timestamp at(int y, unsigned m, unsigned d, int hour = 9) {
  using namespace std::chrono;
  return compass::start_of_day(year_month_day{year{y}, month{m}, day{d}}) + hours{hour};
}

inline compass::Evaluation make_eval(std::string article, std::string newspaper, std::string model, double econ,
                                     double dem, compass::Timestamp when = at(2024, 5, 9)) {
  compass::Evaluation e;
  e.article_id = std::move(article);
  e.newspaper_id = std::move(newspaper);
  e.model_id = std::move(model);
  e.score = compass::CompassScore(econ, dem);
  e.raw_text = "[" + std::to_string(static_cast<int>(econ)) + ", " + std::to_string(static_cast<int>(dem)) + "]";
  e.evaluated_at = when;
  e.batch_day = compass::utc_date(when);
  return e;
}

/// Provider that replays a fixed script of attempts, then repeats the last one.
class ScriptedProvider final : public compass::Provider {
 public:
  explicit ScriptedProvider(std::vector<compass::Attempt> script) : script_(std::move(script)) {}

  static compass::Attempt ok(std::string text) {
    compass::Attempt a;
    a.status = 200;
    a.response.text = std::move(text);
    return a;
  }
  static compass::Attempt status(int code) {
    compass::Attempt a;
    a.kind = (code == 429 || code >= 500) ? compass::Attempt::Kind::Transient : compass::Attempt::Kind::Fatal;
    a.status = code;
    a.detail = "HTTP " + std::to_string(code);
    return a;
  }
  static compass::Attempt timeout() {
    compass::Attempt a;
    a.kind = compass::Attempt::Kind::Timeout;
    a.detail = "timed out";
    return a;
  }

  compass::Attempt call(const compass::ModelSpec& spec, const compass::Prompt&) override {
    std::lock_guard lock(mu_);
    compass::Attempt a = script_[std::min(next_, script_.size() - 1)];
    ++next_;
    a.response.model_id = spec.id;
    return a;
  }
  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return next_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<compass::Attempt> script_;
  std::size_t next_ = 0;
};

/// Answers per article body via a callback.
class FunctionProvider final : public compass::Provider {
 public:
  explicit FunctionProvider(std::function<std::string(std::string_view body)> fn) : fn_(std::move(fn)) {}
  compass::Attempt call(const compass::ModelSpec& spec, const compass::Prompt& prompt) override {
    compass::Attempt a;
    a.status = 200;
    a.response.text = fn_(compass::article_of(prompt));
    a.response.model_id = spec.id;
    return a;
  }

 private:
  std::function<std::string(std::string_view)> fn_;
};

}  // namespace testsupport
