#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "compass/error.hpp"
#include "compass/fetch.hpp"
#include "compass/time.hpp"
#include "compass/url.hpp"

namespace compass {

struct CandidateUrl {
  std::string url;               // absolute, normalized
  std::size_t char_length = 0;   // Unicode scalar count of url
  std::string discovered_from;   // homepage URL

  friend bool operator==(const CandidateUrl&, const CandidateUrl&) = default;
};

struct ArticleRecord {
  std::string id;  // derived from a hash of body_text
  std::string newspaper_id;
  std::string url;
  std::optional<std::string> title;
  std::string body_text;
  std::size_t char_length = 0;  // Unicode scalar count of body_text
  Timestamp fetched_at;

  friend bool operator==(const ArticleRecord&, const ArticleRecord&) = default;
};

/// The page has no identifiable main content (listing pages, script-only shells).
class ExtractionEmpty : public Error {
 public:
  explicit ExtractionEmpty(const std::string& what) : Error("no article content: " + what) {}
};

/// Stable id for an article body: first 16 hex digits of its SHA-256.
std::string article_id_for(std::string_view body_text);

/// Hyperlinks of a page: resolved against the page (or its <base href>),
/// normalized, http(s) only, same-document "#..." links dropped, de-duplicated
/// in order of first appearance, then capped at `max_links`.
std::vector<CandidateUrl> extract_links(std::string_view html, const Url& page_url, int max_links);

/// Fetches the homepage and extracts up to N links. Throws FetchError or NotHtml.
std::vector<CandidateUrl> scrape_hyperlinks(Fetcher& fetcher, const Url& homepage, int max_links);

/// The `count` longest URLs, longest first, equal lengths ordered by URL.
std::vector<CandidateUrl> select_longest_urls(std::span<const CandidateUrl> candidates, int count);

struct ExtractedText {
  std::optional<std::string> title;
  std::string body;
};

/// Main-content extraction by text density: boilerplate subtrees (navigation,
/// headers, footers, scripts, bylines, share/related widgets) are dropped,
/// paragraphs that are mostly link text are ignored, and the body is the
/// largest run of paragraphs sharing one parent, joined by blank lines.
/// Throws ExtractionEmpty when that block is shorter than kMinBlockChars.
ExtractedText extract_main_text(std::string_view html);

inline constexpr std::size_t kMinBlockChars = 200;

ArticleRecord extract_article(Fetcher& fetcher, const Url& url, std::string_view newspaper_id, const Clock& clock);

/// Records with min_chars <= char_length <= max_chars, order preserved.
std::vector<ArticleRecord> filter_by_length(std::span<const ArticleRecord> articles, int min_chars, int max_chars);

}  // namespace compass
