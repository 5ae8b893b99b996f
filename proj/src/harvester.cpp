#include "compass/harvester.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "compass/html.hpp"
#include "compass/text.hpp"

namespace compass {
namespace {

using html::Document;
using html::Node;
using html::NodeId;

const std::unordered_set<std::string_view> kBoilerplateTags = {
    "script", "style", "noscript", "nav",    "header", "footer", "aside",  "form",     "iframe",
    "svg",    "button", "select",  "template", "figure", "address", "menu", "textarea", "object"};

constexpr std::string_view kBoilerplateHints[] = {
    "byline",    "author",   "share",     "social",   "comment",  "related",    "promo",
    "advert",    "sponsor",  "newsletter", "subscribe", "breadcrumb", "menu",    "sidebar",
    "cookie",    "footer",   "header",    "navbar",   "navigation", "widget",   "recommend",
    "signup",    "paywall",  "outbrain",  "taboola"};

const std::unordered_set<std::string_view> kBoilerplateTokens = {"ad", "ads", "nav", "meta", "tags", "caption",
                                                                 "credit", "credits"};

bool hinted(std::string_view attr_value) {
  std::istringstream tokens{to_lower_ascii(attr_value)};
  std::string token;
  while (tokens >> token) {
    if (kBoilerplateTokens.count(token)) return true;
    for (auto hint : kBoilerplateHints) {
      if (token.find(hint) != std::string::npos) return true;
    }
  }
  return false;
}

bool is_boilerplate(const Node& n) {
  if (!n.is_element()) return false;
  if (kBoilerplateTags.count(n.tag)) return true;
  if (auto v = n.attr("class"); v && hinted(*v)) return true;
  if (auto v = n.attr("id"); v && hinted(*v)) return true;
  if (auto v = n.attr("rel"); v && to_lower_ascii(*v).find("author") != std::string::npos) return true;
  if (auto v = n.attr("itemprop"); v && to_lower_ascii(*v).find("author") != std::string::npos) return true;
  if (auto v = n.attr("role"); v && (*v == "navigation" || *v == "banner" || *v == "contentinfo" || *v == "complementary")) {
    return true;
  }
  if (auto v = n.attr("hidden"); v) return true;
  return false;
}

struct Paragraph {
  std::string text;
  std::size_t chars = 0;
};

// Text of a paragraph minus removed subtrees, plus how much of it is link text.
Paragraph paragraph_text(const Document& doc, NodeId p, const std::vector<bool>& removed, std::size_t& link_chars) {
  std::string raw;
  std::string link_raw;
  struct Item {
    NodeId id;
    bool in_link;
  };
  std::vector<Item> todo{{p, false}};
  while (!todo.empty()) {
    const auto [id, in_link] = todo.back();
    todo.pop_back();
    if (removed[static_cast<std::size_t>(id)]) continue;
    const Node& n = doc.node(id);
    if (!n.is_element()) {
      raw += n.text;
      if (in_link) link_raw += n.text;
      continue;
    }
    if (n.tag == "br") raw.push_back(' ');
    const bool link = in_link || n.tag == "a";
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) todo.push_back({*it, link});
  }
  Paragraph out;
  out.text = collapse_whitespace(raw);
  out.chars = utf8_length(out.text);
  link_chars = utf8_length(collapse_whitespace(link_raw));
  return out;
}

std::optional<std::string> find_title(const Document& doc) {
  for (NodeId h : doc.elements_by_tag("h1")) {
    if (doc.inside(h, "nav") || doc.inside(h, "footer")) continue;
    std::string t = collapse_whitespace(doc.text_content(h));
    if (!t.empty()) return t;
  }
  for (NodeId m : doc.elements_by_tag("meta")) {
    const Node& n = doc.node(m);
    if (n.attr("property").value_or("") == "og:title") {
      std::string t = collapse_whitespace(n.attr("content").value_or(""));
      if (!t.empty()) return t;
    }
  }
  for (NodeId t : doc.elements_by_tag("title")) {
    std::string s = collapse_whitespace(doc.text_content(t));
    if (!s.empty()) return s;
  }
  return std::nullopt;
}

}  // namespace

std::string article_id_for(std::string_view body_text) { return sha256_hex(body_text).substr(0, 16); }

std::vector<CandidateUrl> extract_links(std::string_view html_text, const Url& page_url, int max_links) {
  const Document doc = Document::parse(html_text);
  Url base = page_url;
  for (NodeId b : doc.elements_by_tag("base")) {
    if (auto href = doc.node(b).attr("href")) {
      if (auto resolved = resolve_reference(page_url, *href)) base = *resolved;
    }
    break;
  }
  std::vector<CandidateUrl> out;
  std::set<std::string> seen;
  const std::string from = page_url.to_string();
  for (NodeId a : doc.elements_by_tag("a")) {
    if (static_cast<int>(out.size()) >= max_links) break;
    const auto href_attr = doc.node(a).attr("href");
    if (!href_attr) continue;
    const std::string href = trim(*href_attr);
    if (href.empty() || href.front() == '#') continue;
    const auto resolved = resolve_reference(base, href);
    if (!resolved || !resolved->is_http()) continue;
    std::string url = normalize(*resolved).to_string();
    if (!seen.insert(url).second) continue;
    CandidateUrl c;
    c.char_length = utf8_length(url);
    c.url = std::move(url);
    c.discovered_from = from;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CandidateUrl> scrape_hyperlinks(Fetcher& fetcher, const Url& homepage, int max_links) {
  const std::string body = fetch_html(fetcher, homepage);
  return extract_links(body, homepage, max_links);
}

std::vector<CandidateUrl> select_longest_urls(std::span<const CandidateUrl> candidates, int count) {
  std::vector<CandidateUrl> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end(), [](const CandidateUrl& a, const CandidateUrl& b) {
    if (a.char_length != b.char_length) return a.char_length > b.char_length;
    return a.url < b.url;
  });
  if (count < 0) count = 0;
  if (sorted.size() > static_cast<std::size_t>(count)) sorted.resize(static_cast<std::size_t>(count));
  return sorted;
}

ExtractedText extract_main_text(std::string_view html_text) {
  const Document doc = Document::parse(html_text);
  std::vector<bool> removed(doc.size(), false);
  for (std::size_t i = 1; i < doc.size(); ++i) {
    const Node& n = doc.node(static_cast<NodeId>(i));
    removed[i] = removed[static_cast<std::size_t>(n.parent)] || is_boilerplate(n);
  }

  struct Block {
    std::size_t chars = 0;
    std::size_t order = 0;
    std::vector<std::string> paragraphs;
  };
  std::map<NodeId, Block> blocks;
  std::size_t order = 0;
  for (NodeId p : doc.elements_by_tag("p")) {
    if (removed[static_cast<std::size_t>(p)]) continue;
    std::size_t link_chars = 0;
    Paragraph para = paragraph_text(doc, p, removed, link_chars);
    if (para.chars == 0 || link_chars * 2 > para.chars) continue;
    auto [it, inserted] = blocks.try_emplace(doc.node(p).parent);
    if (inserted) it->second.order = order++;
    it->second.chars += para.chars;
    it->second.paragraphs.push_back(std::move(para.text));
  }

  const Block* best = nullptr;
  for (const auto& [parent, block] : blocks) {
    if (!best || block.chars > best->chars || (block.chars == best->chars && block.order < best->order)) {
      best = &block;
    }
  }
  if (!best || best->chars < kMinBlockChars) {
    throw ExtractionEmpty(best ? "largest text block has only " + std::to_string(best->chars) + " characters"
                               : "no paragraphs found");
  }

  ExtractedText out;
  out.title = find_title(doc);
  for (std::size_t i = 0; i < best->paragraphs.size(); ++i) {
    if (i) out.body += "\n\n";
    out.body += best->paragraphs[i];
  }
  return out;
}

ArticleRecord extract_article(Fetcher& fetcher, const Url& url, std::string_view newspaper_id, const Clock& clock) {
  const std::string body = fetch_html(fetcher, url);
  ExtractedText text = extract_main_text(body);
  ArticleRecord rec;
  rec.id = article_id_for(text.body);
  rec.newspaper_id = std::string(newspaper_id);
  rec.url = url.to_string();
  rec.title = std::move(text.title);
  rec.char_length = utf8_length(text.body);
  rec.body_text = std::move(text.body);
  rec.fetched_at = clock.now();
  return rec;
}

std::vector<ArticleRecord> filter_by_length(std::span<const ArticleRecord> articles, int min_chars, int max_chars) {
  std::vector<ArticleRecord> out;
  for (const auto& a : articles) {
    const auto len = static_cast<long long>(a.char_length);
    if (len >= min_chars && len <= max_chars) out.push_back(a);
  }
  return out;
}

}  // namespace compass
