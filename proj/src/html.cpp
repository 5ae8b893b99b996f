#include "compass/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "compass/text.hpp"

namespace compass::html {
namespace {

const std::unordered_set<std::string_view> kVoid = {"area", "base", "br",   "col",   "embed",
                                                    "hr",   "img",  "input", "link", "meta",
                                                    "param", "source", "track", "wbr"};

const std::unordered_set<std::string_view> kInline = {
    "a",    "span", "b",    "i",   "em",  "strong", "small", "u",   "font", "abbr",
    "cite", "code", "time", "mark", "sub", "sup",    "q",     "s",   "label", "bdi"};

// Opening any of these closes an open <p>.
const std::unordered_set<std::string_view> kClosesP = {
    "address", "article", "aside", "blockquote", "div",    "dl",   "fieldset", "figure",
    "footer",  "form",    "h1",    "h2",         "h3",     "h4",   "h5",       "h6",
    "header",  "hr",      "main",  "nav",        "ol",     "p",    "pre",      "section",
    "table",   "ul",      "li",    "dd",         "dt",     "figcaption"};

const std::unordered_map<std::string_view, char32_t>& entity_table() {
  static const std::unordered_map<std::string_view, char32_t> table = {
      {"amp", U'&'},       {"lt", U'<'},         {"gt", U'>'},        {"quot", U'"'},
      {"apos", U'\''},     {"nbsp", 0xA0},       {"ndash", 0x2013},   {"mdash", 0x2014},
      {"hellip", 0x2026},  {"laquo", 0xAB},      {"raquo", 0xBB},     {"lsquo", 0x2018},
      {"rsquo", 0x2019},   {"ldquo", 0x201C},    {"rdquo", 0x201D},   {"sbquo", 0x201A},
      {"bdquo", 0x201E},   {"copy", 0xA9},       {"reg", 0xAE},       {"trade", 0x2122},
      {"euro", 0x20AC},    {"pound", 0xA3},      {"yen", 0xA5},       {"cent", 0xA2},
      {"deg", 0xB0},       {"middot", 0xB7},     {"bull", 0x2022},    {"times", 0xD7},
      {"divide", 0xF7},    {"shy", 0xAD},        {"zwnj", 0x200C},    {"zwj", 0x200D},
      {"thinsp", 0x2009},  {"ensp", 0x2002},     {"emsp", 0x2003},    {"iexcl", 0xA1},
      {"iquest", 0xBF},    {"sect", 0xA7},       {"para", 0xB6},      {"ordf", 0xAA},
      {"ordm", 0xBA},      {"agrave", 0xE0},     {"aacute", 0xE1},    {"acirc", 0xE2},
      {"atilde", 0xE3},    {"auml", 0xE4},       {"aring", 0xE5},     {"aelig", 0xE6},
      {"ccedil", 0xE7},    {"egrave", 0xE8},     {"eacute", 0xE9},    {"ecirc", 0xEA},
      {"euml", 0xEB},      {"igrave", 0xEC},     {"iacute", 0xED},    {"icirc", 0xEE},
      {"iuml", 0xEF},      {"ntilde", 0xF1},     {"ograve", 0xF2},    {"oacute", 0xF3},
      {"ocirc", 0xF4},     {"otilde", 0xF5},     {"ouml", 0xF6},      {"oslash", 0xF8},
      {"ugrave", 0xF9},    {"uacute", 0xFA},     {"ucirc", 0xFB},     {"uuml", 0xFC},
      {"yacute", 0xFD},    {"yuml", 0xFF},       {"szlig", 0xDF},     {"Agrave", 0xC0},
      {"Aacute", 0xC1},    {"Acirc", 0xC2},      {"Atilde", 0xC3},    {"Auml", 0xC4},
      {"Aring", 0xC5},     {"AElig", 0xC6},      {"Ccedil", 0xC7},    {"Egrave", 0xC8},
      {"Eacute", 0xC9},    {"Ecirc", 0xCA},      {"Euml", 0xCB},      {"Igrave", 0xCC},
      {"Iacute", 0xCD},    {"Icirc", 0xCE},      {"Iuml", 0xCF},      {"Ntilde", 0xD1},
      {"Ograve", 0xD2},    {"Oacute", 0xD3},     {"Ocirc", 0xD4},     {"Otilde", 0xD5},
      {"Ouml", 0xD6},      {"Oslash", 0xD8},     {"Ugrave", 0xD9},    {"Uacute", 0xDA},
      {"Ucirc", 0xDB},     {"Uuml", 0xDC},       {"Yacute", 0xDD},
  };
  return table;
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':' || c == '_';
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

std::size_t find_icase(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.empty()) return from;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    if (iequals_ascii(hay.substr(i, needle.size()), needle)) return i;
  }
  return std::string_view::npos;
}

class TreeBuilder {
 public:
  explicit TreeBuilder(std::vector<Node>& nodes) : nodes_(nodes) {
    nodes_.push_back(Node{Node::Kind::Element, "#document", {}, {}, -1, {}});
    stack_.push_back(0);
  }

  void text(std::string t) {
    if (t.empty()) return;
    const NodeId parent = stack_.back();
    auto& siblings = nodes_[static_cast<std::size_t>(parent)].children;
    if (!siblings.empty()) {
      Node& prev = nodes_[static_cast<std::size_t>(siblings.back())];
      if (prev.kind == Node::Kind::Text) {
        prev.text += t;
        return;
      }
    }
    add(Node{Node::Kind::Text, {}, {}, std::move(t), parent, {}});
  }

  NodeId open(std::string tag, std::vector<std::pair<std::string, std::string>> attrs, bool self_closing) {
    if (kClosesP.count(tag)) close_open_p();
    if (tag == "li") close_sibling("li", {"ul", "ol", "menu"});
    if (tag == "dt" || tag == "dd") {
      close_sibling("dt", {"dl"});
      close_sibling("dd", {"dl"});
    }
    if (tag == "option") close_sibling("option", {"select", "datalist"});
    if (tag == "tr") close_sibling("tr", {"table", "tbody", "thead", "tfoot"});
    if (tag == "td" || tag == "th") {
      close_sibling("td", {"tr", "table"});
      close_sibling("th", {"tr", "table"});
    }
    const bool is_void = kVoid.count(tag) > 0;
    const NodeId id = add(Node{Node::Kind::Element, std::move(tag), std::move(attrs), {}, stack_.back(), {}});
    if (!is_void && !self_closing) stack_.push_back(id);
    return id;
  }

  void close(std::string_view tag) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (nodes_[static_cast<std::size_t>(stack_[i])].tag == tag) {
        stack_.resize(i);
        return;
      }
    }
  }

 private:
  NodeId add(Node n) {
    const auto id = static_cast<NodeId>(nodes_.size());
    const NodeId parent = n.parent;
    nodes_.push_back(std::move(n));
    nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
  }

  void close_open_p() {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const auto& tag = nodes_[static_cast<std::size_t>(stack_[i])].tag;
      if (tag == "p") {
        stack_.resize(i);
        return;
      }
      if (!kInline.count(tag)) return;
    }
  }

  void close_sibling(std::string_view tag, std::initializer_list<std::string_view> stops) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const auto& t = nodes_[static_cast<std::size_t>(stack_[i])].tag;
      if (t == tag) {
        stack_.resize(i);
        return;
      }
      if (std::find(stops.begin(), stops.end(), t) != stops.end()) return;
    }
  }

  std::vector<Node>& nodes_;
  std::vector<NodeId> stack_;
};

}  // namespace

std::optional<std::string_view> Node::attr(std::string_view name) const {
  for (const auto& [k, v] : attrs) {
    if (k == name) return std::string_view(v);
  }
  return std::nullopt;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  const auto& table = entity_table();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    if (i + 1 < s.size() && s[i + 1] == '#') {
      std::size_t j = i + 2;
      const bool hex = j < s.size() && (s[j] == 'x' || s[j] == 'X');
      if (hex) ++j;
      const std::size_t start = j;
      char32_t cp = 0;
      while (j < s.size() && (hex ? std::isxdigit(static_cast<unsigned char>(s[j]))
                                  : std::isdigit(static_cast<unsigned char>(s[j])))) {
        const char c = s[j];
        const unsigned digit = std::isdigit(static_cast<unsigned char>(c))
                                   ? static_cast<unsigned>(c - '0')
                                   : static_cast<unsigned>(std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
        if (cp < 0x110000) cp = cp * (hex ? 16 : 10) + digit;
        ++j;
      }
      if (j == start) {
        out.push_back('&');
        continue;
      }
      if (cp == 0) cp = 0xFFFD;
      append_utf8(out, cp);
      i = (j < s.size() && s[j] == ';') ? j : j - 1;
      continue;
    }
    std::size_t j = i + 1;
    while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j])) && j - i <= 10) ++j;
    if (j < s.size() && s[j] == ';') {
      if (const auto it = table.find(s.substr(i + 1, j - i - 1)); it != table.end()) {
        append_utf8(out, it->second);
        i = j;
        continue;
      }
    }
    out.push_back('&');
  }
  return out;
}

Document Document::parse(std::string_view html) {
  Document doc;
  TreeBuilder builder(doc.nodes_);
  std::size_t pos = 0;
  const std::size_t n = html.size();
  while (pos < n) {
    const std::size_t lt = html.find('<', pos);
    if (lt != pos) {
      builder.text(decode_entities(html.substr(pos, lt == std::string_view::npos ? n - pos : lt - pos)));
    }
    if (lt == std::string_view::npos) break;
    if (html.compare(lt, 4, "<!--") == 0) {
      const std::size_t end = html.find("-->", lt + 4);
      pos = end == std::string_view::npos ? n : end + 3;
      continue;
    }
    if (lt + 1 < n && (html[lt + 1] == '!' || html[lt + 1] == '?')) {
      const std::size_t end = html.find('>', lt);
      pos = end == std::string_view::npos ? n : end + 1;
      continue;
    }
    const bool end_tag = lt + 1 < n && html[lt + 1] == '/';
    std::size_t p = lt + (end_tag ? 2 : 1);
    if (p >= n || !std::isalpha(static_cast<unsigned char>(html[p]))) {
      if (end_tag) {
        const std::size_t end = html.find('>', lt);
        pos = end == std::string_view::npos ? n : end + 1;
      } else {
        builder.text("<");
        pos = lt + 1;
      }
      continue;
    }
    const std::size_t name_start = p;
    while (p < n && is_name_char(html[p])) ++p;
    std::string tag = to_lower_ascii(html.substr(name_start, p - name_start));

    if (end_tag) {
      const std::size_t end = html.find('>', p);
      pos = end == std::string_view::npos ? n : end + 1;
      builder.close(tag);
      continue;
    }

    std::vector<std::pair<std::string, std::string>> attrs;
    bool self_closing = false;
    while (p < n) {
      while (p < n && is_ws(html[p])) ++p;
      if (p >= n) break;
      if (html[p] == '>') {
        ++p;
        break;
      }
      if (html[p] == '/') {
        if (p + 1 < n && html[p + 1] == '>') {
          self_closing = true;
          p += 2;
          break;
        }
        ++p;
        continue;
      }
      const std::size_t an = p;
      while (p < n && !is_ws(html[p]) && html[p] != '=' && html[p] != '>' && html[p] != '/') ++p;
      if (p == an) {
        ++p;
        continue;
      }
      std::string name = to_lower_ascii(html.substr(an, p - an));
      while (p < n && is_ws(html[p])) ++p;
      std::string value;
      if (p < n && html[p] == '=') {
        ++p;
        while (p < n && is_ws(html[p])) ++p;
        if (p < n && (html[p] == '"' || html[p] == '\'')) {
          const char q = html[p];
          const std::size_t close = html.find(q, p + 1);
          const std::size_t stop = close == std::string_view::npos ? n : close;
          value = decode_entities(html.substr(p + 1, stop - p - 1));
          p = close == std::string_view::npos ? n : close + 1;
        } else {
          const std::size_t vs = p;
          while (p < n && !is_ws(html[p]) && html[p] != '>') ++p;
          value = decode_entities(html.substr(vs, p - vs));
        }
      }
      const bool seen = std::any_of(attrs.begin(), attrs.end(), [&](const auto& kv) { return kv.first == name; });
      if (!seen) attrs.emplace_back(std::move(name), std::move(value));
    }
    pos = p;

    const bool raw = tag == "script" || tag == "style" || tag == "textarea" || tag == "title";
    builder.open(tag, std::move(attrs), self_closing);
    if (raw && !self_closing) {
      const std::size_t close = find_icase(html, "</" + tag, pos);
      const std::size_t stop = close == std::string_view::npos ? n : close;
      std::string content(html.substr(pos, stop - pos));
      if (tag == "textarea" || tag == "title") content = decode_entities(content);
      builder.text(std::move(content));
      builder.close(tag);
      if (close == std::string_view::npos) {
        pos = n;
      } else {
        const std::size_t gt = html.find('>', close);
        pos = gt == std::string_view::npos ? n : gt + 1;
      }
    }
  }
  return doc;
}

std::vector<NodeId> Document::elements_by_tag(std::string_view tag) const {
  std::vector<NodeId> out;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].is_element() && nodes_[i].tag == tag) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

std::string Document::text_content(NodeId id) const {
  std::string out;
  std::vector<NodeId> todo{id};
  while (!todo.empty()) {
    const NodeId cur = todo.back();
    todo.pop_back();
    const Node& n = node(cur);
    if (n.kind == Node::Kind::Text) {
      out += n.text;
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) todo.push_back(*it);
  }
  return out;
}

bool Document::inside(NodeId id, std::string_view tag) const {
  for (NodeId cur = id; cur >= 0; cur = node(cur).parent) {
    if (node(cur).is_element() && node(cur).tag == tag) return true;
  }
  return false;
}

}  // namespace compass::html
