#include "compass/fetch.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>

#include "compass/text.hpp"

namespace compass {

std::string fetch_html(Fetcher& fetcher, const Url& url) {
  FetchResult r = fetcher.fetch(url);
  if (r.status < 200 || r.status >= 300) {
    throw FetchError(r.status, "HTTP " + std::to_string(r.status) + " for " + url.to_string());
  }
  const std::string ct = to_lower_ascii(r.content_type);
  if (!ct.empty() && ct.find("text/html") == std::string::npos && ct.find("application/xhtml") == std::string::npos) {
    throw NotHtml(r.content_type);
  }
  return std::move(r.body);
}

void HostGate::acquire(const std::string& host) {
  Timestamp wake;
  {
    std::lock_guard lock(mu_);
    const Timestamp now = clock_.now();
    auto [it, inserted] = next_slot_.try_emplace(host, now);
    wake = std::max(now, it->second);
    it->second = wake + min_delay_;
  }
  clock_.sleep_until(wake);
}

HttpFetcher::HttpFetcher(HttpFetcherOptions options, Clock& clock)
    : options_(std::move(options)), clock_(clock), gate_(clock, options_.min_host_delay) {}

FetchResult HttpFetcher::raw_get(const Url& url) {
  gate_.acquire(url.host);
  httplib::Client client(url.origin());
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_follow_location(false);
  httplib::Headers headers = {{"User-Agent", options_.user_agent}, {"Accept", "text/html,application/xhtml+xml"}};
  auto res = client.Get(url.path_and_query(), headers);
  if (!res) {
    throw FetchError(0, "request to " + url.to_string() + " failed: " + httplib::to_string(res.error()));
  }
  FetchResult out;
  out.status = res->status;
  out.content_type = res->get_header_value("Content-Type");
  out.body = std::move(res->body);
  if (out.status >= 300 && out.status < 400) out.location = res->get_header_value("Location");
  return out;
}

const RobotsPolicy& HttpFetcher::robots_for(const Url& url) {
  const std::string origin = url.origin();
  {
    std::lock_guard lock(robots_mu_);
    if (auto it = robots_.find(origin); it != robots_.end()) return it->second;
  }
  RobotsPolicy policy;
  try {
    auto robots_url = url;
    robots_url.path = "/robots.txt";
    robots_url.query.reset();
    robots_url.fragment.reset();
    const FetchResult r = raw_get(robots_url);
    if (r.status >= 200 && r.status < 300) policy = RobotsPolicy::parse(r.body, options_.user_agent);
  } catch (const FetchError&) {
    // Unreachable robots.txt: treated as allow-all.
  }
  std::lock_guard lock(robots_mu_);
  return robots_.try_emplace(origin, std::move(policy)).first->second;
}

FetchResult HttpFetcher::fetch(const Url& url) {
  Url current = url;
  for (int hop = 0;; ++hop) {
    if (!current.is_http()) throw FetchError(0, "unsupported scheme in " + current.to_string());
    if (options_.honor_robots && !robots_for(current).allowed(current.path_and_query())) {
      throw RobotsDisallowed(current.to_string());
    }
    FetchResult r = raw_get(current);
    if (r.status < 300 || r.status >= 400) return r;
    const auto next = resolve_reference(current, r.location);
    if (!next || hop >= options_.max_redirects) {
      throw FetchError(r.status, "bad or excessive redirect from " + current.to_string());
    }
    current = *next;
  }
}

namespace {
std::string fixture_site(const Url& url) {
  std::string host = url.host;
  if (host.rfind("www.", 0) == 0) host.erase(0, 4);
  return host.substr(0, host.find('.'));
}
}  // namespace

std::filesystem::path FixtureFetcher::path_for(const Url& url) const {
  const std::string site = fixture_site(url);
  std::string path = url.path.empty() ? "/" : url.path;
  if (path.back() == '/') path += "index.html";
  std::filesystem::path p = root_ / site / std::filesystem::path(path.substr(1));
  if (!std::filesystem::exists(p) && !p.has_extension()) p += ".html";
  return p;
}

FetchResult FixtureFetcher::fetch(const Url& url) {
  const auto p = path_for(url);
  FetchResult r;
  // Confine lookups to the site directory.
  const auto site_root = (root_ / fixture_site(url)).lexically_normal();
  const auto rel = p.lexically_normal().lexically_relative(site_root);
  const bool escapes = rel.empty() || *rel.begin() == "..";
  std::ifstream in(p, std::ios::binary);
  if (escapes || !in || std::filesystem::is_directory(p)) {
    r.status = 404;
    r.content_type = "text/plain";
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  r.status = 200;
  r.body = ss.str();
  const std::string ext = to_lower_ascii(p.extension().string());
  if (ext == ".html" || ext == ".htm") {
    r.content_type = "text/html; charset=utf-8";
  } else if (ext == ".txt") {
    r.content_type = "text/plain; charset=utf-8";
  } else if (ext == ".json") {
    r.content_type = "application/json";
  } else {
    r.content_type = "application/octet-stream";
  }
  return r;
}

}  // namespace compass
