#include <doctest.h>

#include "compass/url.hpp"

using namespace compass;

namespace {
std::string resolve(const char* base, const char* ref) {
  const auto b = Url::parse(base);
  REQUIRE(b);
  const auto r = resolve_reference(*b, ref);
  return r ? r->to_string() : "<none>";
}
}  // namespace

TEST_CASE("parse splits components") {
  const auto u = Url::parse("HTTPS://user@Example.com:8443/a/b?x=1#frag");
  REQUIRE(u);
  CHECK(u->scheme == "https");
  CHECK(u->userinfo == "user");
  CHECK(u->port == 8443);
  CHECK(u->path == "/a/b");
  CHECK(u->query == "x=1");
  CHECK(u->fragment == "frag");
  CHECK(u->origin() == "https://example.com:8443");
  CHECK_FALSE(Url::parse("/relative/path"));
  CHECK_FALSE(Url::parse("mailto:someone@example.com"));
}

TEST_CASE("reference resolution examples from the RFC") {
  const char* base = "http://a/b/c/d;p?q";
  CHECK(resolve(base, "g") == "http://a/b/c/g");
  CHECK(resolve(base, "./g") == "http://a/b/c/g");
  CHECK(resolve(base, "g/") == "http://a/b/c/g/");
  CHECK(resolve(base, "/g") == "http://a/g");
  CHECK(resolve(base, "//g") == "http://g");
  CHECK(resolve(base, "?y") == "http://a/b/c/d;p?y");
  CHECK(resolve(base, "g?y") == "http://a/b/c/g?y");
  CHECK(resolve(base, "#s") == "http://a/b/c/d;p?q#s");
  CHECK(resolve(base, "..") == "http://a/b/");
  CHECK(resolve(base, "../g") == "http://a/b/g");
  CHECK(resolve(base, "../../g") == "http://a/g");
  CHECK(resolve(base, "../../../g") == "http://a/g");
  CHECK(resolve(base, "g;x=1/../y") == "http://a/b/c/y");
  CHECK(resolve(base, "") == "http://a/b/c/d;p?q");
}

TEST_CASE("normalize drops fragment and default port") {
  const auto u = Url::parse("HTTP://WWW.Example.COM:80#top");
  REQUIRE(u);
  CHECK(normalize(*u).to_string() == "http://www.example.com/");
  const auto v = Url::parse("https://example.com:443/p?q=A");
  CHECK(normalize(*v).to_string() == "https://example.com/p?q=A");
  CHECK(is_absolute_http_url("https://x.org/a"));
  CHECK_FALSE(is_absolute_http_url("ftp://x.org/a"));
  CHECK_FALSE(is_absolute_http_url("x.org/a"));
}
