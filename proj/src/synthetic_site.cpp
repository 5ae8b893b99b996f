#include "compass/synthetic_site.hpp"

#include <array>
#include <random>

#include "compass/text.hpp"

namespace compass {
namespace {

// Mixed-script vocabulary; the registry spans many languages.
constexpr std::array<std::string_view, 64> kWords = {
    "government", "budget",   "reform",     "minister",   "parliament", "market",     "inflation",  "workers",
    "taxes",      "election", "coalition",  "court",      "union",      "housing",    "energy",     "prices",
    "growth",     "debate",   "council",    "citizens",   "policy",     "industry",   "wages",      "pension",
    "trade",      "security", "freedom",    "protest",    "regulation", "investment", "subsidy",    "welfare",
    "économie",   "société",  "régime",     "mañana",     "política",   "ciudadanía", "Wirtschaft", "Straße",
    "ekonomi",    "hükümet",  "seçim",      "οικονομία",  "κυβέρνηση",  "εκλογές",    "अर्थव्यवस्था", "सरकार",
    "чиновник",   "выборы",   "الاقتصاد",   "الحكومة",    "経済",       "選挙",       "gazdaság",   "választás",
    "økonomi",    "regjering", "vláda",     "ekonomika",  "economia",   "governo",    "economie",   "regering"};

constexpr std::array<std::string_view, 6> kSections = {"politics", "economy", "world", "society", "opinion", "culture"};

constexpr std::array<std::string_view, 12> kFirstNames = {"Jane",  "Carlos", "Amélie", "Yusuf",  "Priya", "Lars",
                                                          "Sofia", "Dmitri", "Aiko",   "Kwame", "Elena", "Tomás"};
constexpr std::array<std::string_view, 12> kLastNames = {"Doe",     "Pereira", "Laurent", "Demir",  "Sharma", "Berg",
                                                         "Rossi",   "Ivanov",  "Tanaka",  "Mensah", "Novak",  "Álvarez"};

class Rng {
 public:
  explicit Rng(std::string_view material) : gen_(sha256_u64(material)) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }

 private:
  std::mt19937_64 gen_;
};

std::string key(const NewspaperSource& src, int day, int index, std::uint64_t seed, std::string_view what) {
  return src.id + "|" + std::to_string(day) + "|" + std::to_string(index) + "|" + std::to_string(seed) + "|" +
         std::string(what);
}

std::string ascii_word(Rng& rng) {
  for (;;) {
    std::string_view w = kWords[rng.below(kWords.size())];
    if (slugify(w) == w) return std::string(w);
  }
}

std::string slug_of_length(Rng& rng, std::size_t min_len) {
  std::string s;
  while (s.size() < min_len) {
    if (!s.empty()) s.push_back('-');
    s += ascii_word(rng);
  }
  return s;
}

std::string sentence(Rng& rng) {
  const std::size_t n = rng.between(8, 16);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s.push_back(' ');
    std::string w(kWords[rng.below(kWords.size())]);
    if (i == 0 && !w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    s += w;
  }
  s.push_back('.');
  return s;
}

// Paragraphs whose joined length ("\n\n" between them) is the first to reach `target`.
std::vector<std::string> body_paragraphs(Rng& rng, std::size_t target) {
  std::vector<std::string> paras(1);
  std::size_t total = 0;
  std::size_t in_para = 0;
  const std::size_t per_para = rng.between(3, 6);
  while (total < target) {
    if (in_para == per_para) {
      paras.emplace_back();
      total += 2;
      in_para = 0;
    }
    std::string s = sentence(rng);
    if (!paras.back().empty()) {
      paras.back().push_back(' ');
      ++total;
    }
    total += utf8_length(s);
    paras.back() += s;
    ++in_para;
  }
  return paras;
}

FetchResult html_page(std::string body) { return {200, "text/html; charset=utf-8", std::move(body), {}}; }

}  // namespace

SyntheticSite::SyntheticSite(std::span<const NewspaperSource> sources, Date first_day, std::uint64_t seed)
    : first_day_(first_day), seed_(seed) {
  for (const auto& s : sources) {
    if (auto u = Url::parse(s.homepage_url)) by_host_.emplace(normalize(*u).host, s);
  }
}

Date SyntheticSite::date_of(int day) const { return Date{std::chrono::sys_days{first_day_} + std::chrono::days{day}}; }

SyntheticSite::Kind SyntheticSite::kind_of(int index) {
  static constexpr std::array<Kind, 20> kTop = {
      Kind::Tag,  Kind::Good,  Kind::Video, Kind::Good, Kind::Short, Kind::Good, Kind::Long,
      Kind::Good, Kind::Good,  Kind::Tag,   Kind::Good, Kind::Short, Kind::Good, Kind::Video,
      Kind::Good, Kind::Short, Kind::Good,  Kind::Long, Kind::Good,  Kind::Good};
  return index < static_cast<int>(kTop.size()) ? kTop[static_cast<std::size_t>(index)] : Kind::Good;
}

std::string SyntheticSite::article_path(const NewspaperSource& src, int day, int index) const {
  Rng rng(key(src, day, index, seed_, "path"));
  std::string section;
  switch (kind_of(index)) {
    case Kind::Tag: section = "tag"; break;
    case Kind::Video: section = "video"; break;
    default: section = std::string(kSections[rng.below(kSections.size())]);
  }
  // The first 20 links outrank everything else on the page by length.
  const std::size_t slug_len = index < 20 ? rng.between(70, 100) : rng.between(20, 36);
  std::string date = format_date(date_of(day));
  for (auto& c : date) {
    if (c == '-') c = '/';
  }
  return "/" + section + "/" + date + "/" + slug_of_length(rng, slug_len) + "-a" + std::to_string(index);
}

std::string SyntheticSite::homepage(const NewspaperSource& src, int day) const {
  Rng rng(key(src, day, -1, seed_, "home"));
  const Url home = normalize(*Url::parse(src.homepage_url));
  const std::string origin = home.origin();
  std::string h = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + src.name +
                  "</title><script>var nav = '<a href=\"/hidden\">x</a>';</script></head>\n<body>\n<header><nav><ul>\n";
  const char* nav[] = {"/politics", "/economy",  "/world",   "/sport",    "/culture", "/opinion",
                       "/science",  "/travel",   "/weather", "/video",    "/podcasts", "/games",
                       "economy/markets", "world/europe", "world/americas", "/tech", "/health", "/food"};
  for (const char* n : nav) h += "<li><a href=\"" + std::string(n) + "\">" + std::string(n) + "</a></li>\n";
  h += "<li><a href=\"#\">Menu</a></li><li><a href=\"#top\">Top</a></li>\n";
  h += "<li><a href=\"javascript:void(0)\">Search</a></li><li><a href=\"mailto:desk@example.org\">Contact</a></li>\n";
  h += "</ul></nav></header>\n<main>\n";
  for (int i = 0; i < 30; ++i) {
    const std::string path = article_path(src, day, i);
    Rng t(key(src, day, i, seed_, "title"));
    const std::string title = sentence(t);
    // Alternate absolute and root-relative hrefs; repeat each as a teaser image
    // link, and again with a fragment, to exercise de-duplication.
    const std::string href = (i % 2 == 0) ? origin + path : path;
    h += "<section class=\"teaser\"><a href=\"" + href + "\"><img src=\"/img/" + std::to_string(i) +
         ".jpg\" alt=\"\"></a>\n<h2><a href=\"" + href + "\">" + title + "</a></h2>\n";
    if (i % 3 == 0) h += "<a href=\"" + href + "#comments\">Comments</a>\n";
    h += "</section>\n";
  }
  h += "</main>\n<footer><ul>\n";
  h += "<li><a href=\"https://www.facebook.com/" + src.id + "\">Facebook</a></li>\n";
  h += "<li><a href=\"https://x.com/" + src.id + "\">X</a></li>\n";
  h += "<li><a href=\"/about\">About</a></li><li><a href=\"/privacy\">Privacy</a></li>\n";
  const std::size_t archive = 160 + rng.below(20);
  for (std::size_t i = 0; i < archive; ++i) {
    h += "<li><a href=\"/archive/" + std::to_string(2000 + i / 12) + "/" + std::to_string(1 + i % 12) +
         "\">Archive</a></li>\n";
  }
  h += "</ul></footer>\n</body></html>\n";
  return h;
}

FetchResult SyntheticSite::article(const NewspaperSource& src, int day, int index) const {
  const Kind kind = kind_of(index);
  if (kind == Kind::Video) return {200, "video/mp4", std::string(64, '\0'), {}};

  Rng rng(key(src, day, index, seed_, "body"));
  Rng title_rng(key(src, day, index, seed_, "title"));
  const std::string title = sentence(title_rng);
  std::string h = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + title + " | " + src.name +
                  "</title>\n<meta property=\"og:title\" content=\"" + title +
                  "\">\n<script>window.dataLayer = [{\"page\": \"<p>article</p>\"}];</script>\n"
                  "<style>p { margin: 0 }</style></head>\n<body>\n<header><nav><a href=\"/\">" +
                  src.name + "</a> <a href=\"/politics\">Politics</a> <a href=\"/economy\">Economy</a></nav></header>\n";

  if (kind == Kind::Tag) {
    h += "<main><h1>Tag: " + ascii_word(rng) + "</h1><ul class=\"listing\">\n";
    for (int i = 0; i < 25; ++i) {
      h += "<li><p><a href=\"/politics/item-" + std::to_string(i) + "\">" + sentence(rng) + "</a></p></li>\n";
    }
    h += "</ul></main>\n</body></html>\n";
    return html_page(std::move(h));
  }

  std::size_t target = 0;
  switch (kind) {
    case Kind::Short: target = rng.between(300, 750); break;
    case Kind::Long: target = rng.between(5300, 7500); break;
    default: target = rng.between(1200, 4600);
  }
  const auto paras = body_paragraphs(rng, target);
  const std::string author =
      std::string(kFirstNames[rng.below(kFirstNames.size())]) + " " + std::string(kLastNames[rng.below(kLastNames.size())]);

  h += "<article>\n<h1>" + title + "</h1>\n<div class=\"byline\">By <span rel=\"author\">" + author +
       "</span></div>\n<div class=\"share-tools\"><p><a href=\"#\">Share</a></p></div>\n<div class=\"article-body\">\n";
  for (std::size_t i = 0; i < paras.size(); ++i) {
    h += "<p>" + paras[i] + "</p>\n";
    if (i == 0) h += "<figure><img src=\"/img/lead.jpg\" alt=\"\"><figcaption>Photo: agency</figcaption></figure>\n";
  }
  h += "</div>\n<aside class=\"related\"><p><a href=\"/politics\">" + sentence(rng) +
       "</a></p></aside>\n</article>\n<footer><p>All rights reserved. " + src.name + ".</p></footer>\n</body></html>\n";
  return html_page(std::move(h));
}

FetchResult SyntheticSite::serve(const Url& url, int day) const {
  const Url u = normalize(url);
  auto it = by_host_.find(u.host);
  if (it == by_host_.end()) return {404, "text/plain", "unknown host", {}};
  const NewspaperSource& src = it->second;
  if (u.path == "/") return html_page(homepage(src, day));

  const auto dash = u.path.rfind("-a");
  if (dash != std::string::npos && dash + 2 < u.path.size()) {
    const std::string digits = u.path.substr(dash + 2);
    if (digits.size() <= 2 && digits.find_first_not_of("0123456789") == std::string::npos) {
      const int index = std::stoi(digits);
      if (index < 30 && article_path(src, day, index) == u.path) return article(src, day, index);
    }
  }
  return {404, "text/html", "<html><body><p>Not found</p></body></html>", {}};
}

std::shared_ptr<Fetcher> SyntheticSite::fetcher_for_day(int day) const {
  return std::make_shared<FunctionFetcher>([this, day](const Url& url) { return serve(url, day); });
}

}  // namespace compass
