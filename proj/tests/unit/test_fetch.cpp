#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "compass/fetch.hpp"
#include "compass/robots.hpp"
#include "support.hpp"

using namespace compass;

namespace {
Url url(const char* s) {
  auto u = Url::parse(s);
  REQUIRE(u);
  return *u;
}
}  // namespace

TEST_CASE("fixture fetcher maps hosts and paths to files") {
  FixtureFetcher f(testsupport::fixtures());
  CHECK(f.path_for(url("https://www.example-daily.test/")).filename() == "index.html");
  CHECK(f.path_for(url("https://www.example-daily.test/byline")).filename() == "byline.html");
  const auto r = f.fetch(url("https://www.example-daily.test/three-links.html"));
  CHECK(r.status == 200);
  CHECK(r.content_type.find("text/html") != std::string::npos);
  CHECK(f.fetch(url("https://www.example-daily.test/missing")).status == 404);
  CHECK(f.fetch(url("https://www.example-daily.test/../registries/tiny3.csv")).status == 404);
}

TEST_CASE("fetch_html requires 2xx html") {
  FunctionFetcher f([](const Url& u) {
    FetchResult r;
    if (u.path == "/video") {
      r.status = 200;
      r.content_type = "video/mp4";
    } else if (u.path == "/gone") {
      r.status = 410;
    } else {
      r.status = 200;
      r.content_type = "text/html";
      r.body = "<p>ok</p>";
    }
    return r;
  });
  CHECK(fetch_html(f, url("https://x.test/")) == "<p>ok</p>");
  CHECK_THROWS_AS(fetch_html(f, url("https://x.test/video")), NotHtml);
  try {
    fetch_html(f, url("https://x.test/gone"));
    FAIL("expected FetchError");
  } catch (const FetchError& e) {
    CHECK(e.status() == 410);
  }
}

TEST_CASE("robots: longest match wins, allow wins ties, wildcards and anchors") {
  const auto p = RobotsPolicy::parse(
      "User-agent: *\nDisallow: /\n\n"
      "User-agent: compass-audit\nDisallow: /private\nAllow: /private/open\nDisallow: /*.pdf$\n"
      "Allow: /tie\nDisallow: /tie\n",
      "compass-audit/1.0 (+crawler)");
  CHECK(p.allowed("/news/story"));
  CHECK_FALSE(p.allowed("/private/x"));
  CHECK(p.allowed("/private/open/x"));
  CHECK_FALSE(p.allowed("/docs/file.pdf"));
  CHECK(p.allowed("/docs/file.pdf?x=1"));
  CHECK(p.allowed("/tie"));

  const auto other = RobotsPolicy::parse("User-agent: *\nDisallow: /\n", "someone-else");
  CHECK_FALSE(other.allowed("/anything"));
  CHECK(RobotsPolicy().allowed("/anything"));
  CHECK(RobotsPolicy::parse("User-agent: *\nDisallow:\n", "x").allowed("/a"));
}

TEST_CASE("host gate spaces requests per host only") {
  SimulatedClock clock(testsupport::at(2024, 5, 9));
  HostGate gate(clock, std::chrono::seconds{2});
  const auto t0 = clock.now();
  gate.acquire("a.test");
  CHECK(clock.now() == t0);
  gate.acquire("b.test");
  CHECK(clock.now() == t0);
  gate.acquire("a.test");
  CHECK(clock.now() - t0 == std::chrono::seconds{2});
}

TEST_CASE("http fetcher honours robots and follows redirects") {
  httplib::Server server;
  server.Get("/robots.txt", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("User-agent: *\nDisallow: /private\n", "text/plain");
  });
  server.Get("/start", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/end"); });
  server.Get("/end", [](const httplib::Request& req, httplib::Response& res) {
    res.set_content("<p>" + req.get_header_value("User-Agent") + "</p>", "text/html");
  });
  server.Get("/private", [](const httplib::Request&, httplib::Response& res) { res.set_content("secret", "text/html"); });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  SystemClock clock;
  HttpFetcherOptions opts;
  opts.min_host_delay = std::chrono::milliseconds{0};
  opts.timeout = std::chrono::seconds{5};
  opts.user_agent = "compass-test";
  HttpFetcher fetcher(opts, clock);
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  const auto end = fetcher.fetch(url((base + "/start").c_str()));
  CHECK(end.status == 200);
  CHECK(end.body == "<p>compass-test</p>");
  CHECK_THROWS_AS(fetcher.fetch(url((base + "/private").c_str())), RobotsDisallowed);

  server.stop();
  th.join();
}
