#include <doctest.h>

#include <algorithm>
#include <random>

#include "compass/harvester.hpp"
#include "compass/text.hpp"
#include "support.hpp"

using namespace compass;
using testsupport::fixtures;
using testsupport::read_file;

namespace {

Url url(const std::string& s) {
  auto u = Url::parse(s);
  REQUIRE(u);
  return *u;
}

const Url kHome = *Url::parse("https://www.example-daily.test/");

std::string fixture(const char* name) { return read_file(fixtures() / "example-daily" / name); }

std::string expected(const char* name) {
  std::string s = read_file(fixtures() / "expected" / name);
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

ArticleRecord record_of_length(std::size_t n) {
  ArticleRecord r;
  r.body_text = std::string(n, 'x');
  r.char_length = n;
  r.id = article_id_for(r.body_text);
  return r;
}

}  // namespace

TEST_CASE("link extraction resolves, drops fragments, keeps order") {
  const auto links = extract_links(fixture("three-links.html"), kHome, 200);
  REQUIRE(links.size() == 3);
  CHECK(links[0].url == "https://www.example-daily.test/politics");
  CHECK(links[2].url == "https://www.example-daily.test/article-1542");
  for (const auto& l : links) {
    CHECK(l.char_length == utf8_length(l.url));
    CHECK(l.discovered_from == kHome.to_string());
  }
}

TEST_CASE("link extraction caps at N") {
  const auto all = extract_links(fixture("many-links.html"), kHome, 1000);
  CHECK(all.size() == 250);
  const auto capped = extract_links(fixture("many-links.html"), kHome, 200);
  REQUIRE(capped.size() == 200);
  CHECK(std::equal(capped.begin(), capped.end(), all.begin()));
}

TEST_CASE("duplicate hrefs collapse to one") {
  CHECK(extract_links(fixture("duplicates.html"), kHome, 200).size() == 1);
}

TEST_CASE("non-http and same-document links are skipped, base href honoured") {
  const auto links = extract_links(
      "<base href='https://cdn.example.test/root/'>"
      "<a href='#x'>a</a><a href='javascript:void(0)'>b</a><a href='mailto:x@y.z'>c</a>"
      "<a href='story#comments'>d</a><a href='story'>e</a><a>f</a>",
      kHome, 200);
  REQUIRE(links.size() == 1);
  CHECK(links[0].url == "https://cdn.example.test/root/story");
}

TEST_CASE("scrape_hyperlinks over the fixture homepage") {
  FixtureFetcher f(fixtures());
  const auto links = scrape_hyperlinks(f, kHome, 200);
  CHECK(links.size() == 6);
}

TEST_CASE("select_longest_urls matches a brute-force oracle") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    std::vector<CandidateUrl> c;
    const int n = static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      CandidateUrl u;
      // Few distinct lengths so ties are common.
      u.url = "https://x.test/" + std::string(rng() % 6, 'a') + std::to_string(rng() % 10);
      u.char_length = utf8_length(u.url);
      c.push_back(u);
    }
    const int s = static_cast<int>(rng() % 25);
    // Oracle: repeatedly take the maximum by (length desc, url asc).
    std::vector<CandidateUrl> pool = c, want;
    while (static_cast<int>(want.size()) < s && !pool.empty()) {
      auto best = pool.begin();
      for (auto it = pool.begin(); it != pool.end(); ++it) {
        if (it->char_length > best->char_length || (it->char_length == best->char_length && it->url < best->url)) {
          best = it;
        }
      }
      want.push_back(*best);
      pool.erase(best);
    }
    CHECK(select_longest_urls(c, s) == want);
  }
}

TEST_CASE("select_longest_urls ties break by url") {
  std::vector<CandidateUrl> c;
  for (const char* s : {"https://x.test/b", "https://x.test/a", "https://x.test/long"}) {
    c.push_back({s, utf8_length(s), ""});
  }
  const auto top = select_longest_urls(c, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].url == "https://x.test/long");
  CHECK(top[1].url == "https://x.test/a");
  CHECK(select_longest_urls(c, 0).empty());
  CHECK(select_longest_urls(c, 10).size() == 3);
}

TEST_CASE("main text of the 1542-character fixture") {
  const auto text = extract_main_text(fixture("article-1542.html"));
  CHECK(utf8_length(text.body) == 1542);
  CHECK(text.body == expected("article-1542.txt"));
  REQUIRE(text.title);
}

TEST_CASE("bylines and widgets are excluded") {
  const auto text = extract_main_text(fixture("byline.html"));
  CHECK(text.body.find("Jane Doe") == std::string::npos);
  CHECK(text.body.find("Share on") == std::string::npos);
  CHECK(text.body == expected("byline.txt"));
  CHECK(text.title == "Coalition talks resume");
}

TEST_CASE("short article extracts fully") {
  const auto text = extract_main_text(fixture("short-article.html"));
  CHECK(text.body == expected("short-article.txt"));
  CHECK(utf8_length(text.body) == 600);
}

TEST_CASE("listing pages have no main content") {
  CHECK_THROWS_AS(extract_main_text(fixture("category.html")), ExtractionEmpty);
  CHECK_THROWS_AS(extract_main_text("<html><body><script>app()</script></body></html>"), ExtractionEmpty);
}

TEST_CASE("extract_article stamps id and length") {
  FixtureFetcher f(fixtures());
  SimulatedClock clock(testsupport::at(2024, 5, 9));
  const auto rec = extract_article(f, url("https://www.example-daily.test/article-1542"), "example-daily", clock);
  CHECK(rec.char_length == 1542);
  CHECK(rec.id == sha256_hex(rec.body_text).substr(0, 16));
  CHECK(rec.fetched_at == clock.now());
  CHECK(rec.newspaper_id == "example-daily");
}

TEST_CASE("length filter boundaries are inclusive") {
  std::vector<ArticleRecord> rs;
  for (std::size_t n : {999, 1000, 1001, 4999, 5000, 5001}) rs.push_back(record_of_length(n));
  const auto kept = filter_by_length(rs, 1000, 5000);
  REQUIRE(kept.size() == 4);
  CHECK(kept.front().char_length == 1000);
  CHECK(kept.back().char_length == 5000);
  CHECK(filter_by_length(kept, 1000, 5000) == kept);
}

TEST_CASE("length filter counts characters, not bytes") {
  ArticleRecord r;
  for (int i = 0; i < 1000; ++i) r.body_text += "\xCE\xB1";  // 1000 alphas, 2000 bytes
  r.char_length = utf8_length(r.body_text);
  CHECK(filter_by_length(std::vector{r}, 1000, 1500).size() == 1);
}
