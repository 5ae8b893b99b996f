#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "compass/error.hpp"
#include "compass/robots.hpp"
#include "compass/time.hpp"
#include "compass/url.hpp"

namespace compass {

struct FetchResult {
  int status = 0;
  std::string content_type;
  std::string body;
  std::string location;  // redirect target, 3xx only
};

/// Non-2xx status, or status 0 for network failures and timeouts.
class FetchError : public Error {
 public:
  FetchError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class RobotsDisallowed : public FetchError {
 public:
  explicit RobotsDisallowed(const std::string& url) : FetchError(0, "disallowed by robots.txt: " + url) {}
};

class NotHtml : public Error {
 public:
  explicit NotHtml(std::string content_type)
      : Error("not an HTML document (content-type '" + content_type + "')"), content_type_(std::move(content_type)) {}
  const std::string& content_type() const { return content_type_; }

 private:
  std::string content_type_;
};

/// Source of page bytes. Implementations must be safe to call from several
/// threads at once.
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  /// Returns whatever the server answered; throws FetchError only when there
  /// is no answer at all.
  virtual FetchResult fetch(const Url& url) = 0;
};

/// Fetches and requires a 2xx HTML response. Throws FetchError or NotHtml.
std::string fetch_html(Fetcher& fetcher, const Url& url);

/// Spaces consecutive requests to the same host by at least `min_delay`.
/// Requests to different hosts never wait on each other.
class HostGate {
 public:
  HostGate(Clock& clock, std::chrono::milliseconds min_delay) : clock_(clock), min_delay_(min_delay) {}
  void acquire(const std::string& host);

 private:
  Clock& clock_;
  std::chrono::milliseconds min_delay_;
  std::mutex mu_;
  std::map<std::string, Timestamp> next_slot_;
};

struct HttpFetcherOptions {
  std::string user_agent = "compass-audit/1.0 (+media-compass research crawler)";
  std::chrono::milliseconds timeout{20'000};
  std::chrono::milliseconds min_host_delay{1'000};
  bool honor_robots = true;
  int max_redirects = 5;
};

/// Live HTTP(S) fetcher: robots.txt checked and cached per origin, per-host
/// politeness delay, redirects followed.
class HttpFetcher final : public Fetcher {
 public:
  HttpFetcher(HttpFetcherOptions options, Clock& clock);
  FetchResult fetch(const Url& url) override;

 private:
  FetchResult raw_get(const Url& url);
  const RobotsPolicy& robots_for(const Url& url);

  HttpFetcherOptions options_;
  Clock& clock_;
  HostGate gate_;
  std::mutex robots_mu_;
  std::map<std::string, RobotsPolicy> robots_;
};

/// Serves pages from `root/<site>/<path>`, where <site> is the first label of
/// the host after any "www." prefix. "/" maps to index.html and extensionless
/// paths fall back to "<path>.html". Missing files answer 404.
class FixtureFetcher final : public Fetcher {
 public:
  explicit FixtureFetcher(std::filesystem::path root) : root_(std::move(root)) {}
  FetchResult fetch(const Url& url) override;
  std::filesystem::path path_for(const Url& url) const;

 private:
  std::filesystem::path root_;
};

/// Adapter for tests and generated sites.
class FunctionFetcher final : public Fetcher {
 public:
  explicit FunctionFetcher(std::function<FetchResult(const Url&)> fn) : fn_(std::move(fn)) {}
  FetchResult fetch(const Url& url) override { return fn_(url); }

 private:
  std::function<FetchResult(const Url&)> fn_;
};

}  // namespace compass
