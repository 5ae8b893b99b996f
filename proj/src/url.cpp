#include "compass/url.hpp"

#include <cctype>
#include <vector>

#include "compass/text.hpp"

namespace compass {
namespace {

struct Reference {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

bool valid_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return false;
  }
  return true;
}

// Encodes bytes that may not appear raw in a URL (spaces, controls, non-ASCII
// stays as is since browsers send it UTF-8 encoded anyway).
std::string clean_reference(std::string_view ref) {
  std::string out;
  const std::string t = trim(ref);
  for (char c : t) {
    const auto u = static_cast<unsigned char>(c);
    if (c == '\t' || c == '\n' || c == '\r') continue;
    if (c == ' ') {
      out += "%20";
    } else if (u < 0x20 || u == 0x7F) {
      continue;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

Reference split(std::string_view s) {
  Reference r;
  if (const auto hash = s.find('#'); hash != std::string_view::npos) {
    r.fragment = std::string(s.substr(hash + 1));
    s = s.substr(0, hash);
  }
  if (const auto q = s.find('?'); q != std::string_view::npos) {
    r.query = std::string(s.substr(q + 1));
    s = s.substr(0, q);
  }
  if (const auto colon = s.find(':'); colon != std::string_view::npos) {
    const auto slash = s.find('/');
    if ((slash == std::string_view::npos || colon < slash) && valid_scheme(s.substr(0, colon))) {
      r.scheme = to_lower_ascii(s.substr(0, colon));
      s = s.substr(colon + 1);
    }
  }
  if (s.substr(0, 2) == "//") {
    s.remove_prefix(2);
    const auto end = s.find('/');
    r.authority = std::string(s.substr(0, end));
    s = end == std::string_view::npos ? std::string_view{} : s.substr(end);
  }
  r.path = std::string(s);
  return r;
}

std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string> out;
  const bool absolute = !path.empty() && path.front() == '/';
  std::size_t i = absolute ? 1 : 0;
  bool trailing_slash = false;
  while (i <= path.size()) {
    const auto next = path.find('/', i);
    const std::string_view seg = path.substr(i, next == std::string_view::npos ? std::string_view::npos : next - i);
    const bool last = next == std::string_view::npos;
    if (seg == ".") {
      trailing_slash = last;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing_slash = last;
    } else {
      out.emplace_back(seg);
      trailing_slash = false;
    }
    if (last) break;
    i = next + 1;
  }
  std::string result = absolute ? "/" : "";
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k) result.push_back('/');
    result += out[k];
  }
  if (trailing_slash && !result.empty() && result.back() != '/') result.push_back('/');
  return result;
}

bool parse_authority(std::string_view auth, Url& url) {
  if (const auto at = auth.rfind('@'); at != std::string_view::npos) {
    url.userinfo = std::string(auth.substr(0, at));
    auth = auth.substr(at + 1);
  }
  std::string_view host = auth;
  std::string_view port;
  if (!auth.empty() && auth.front() == '[') {
    const auto close = auth.find(']');
    if (close == std::string_view::npos) return false;
    host = auth.substr(0, close + 1);
    if (close + 1 < auth.size()) {
      if (auth[close + 1] != ':') return false;
      port = auth.substr(close + 2);
    }
  } else if (const auto colon = auth.rfind(':'); colon != std::string_view::npos) {
    host = auth.substr(0, colon);
    port = auth.substr(colon + 1);
  }
  if (host.empty()) return false;
  for (char c : host) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '/' || c == '\\' || c == '?' || c == '#' || c == '@' || c == '<' || c == '>') {
      return false;
    }
  }
  url.host = to_lower_ascii(host);
  if (!port.empty()) {
    int p = 0;
    for (char c : port) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
      p = p * 10 + (c - '0');
      if (p > 65535) return false;
    }
    url.port = p;
  }
  return true;
}

std::optional<Url> from_reference(const Reference& r) {
  if (!r.scheme || !r.authority) return std::nullopt;
  Url url;
  url.scheme = *r.scheme;
  if (!parse_authority(*r.authority, url)) return std::nullopt;
  url.path = r.path;
  url.query = r.query;
  url.fragment = r.fragment;
  return url;
}

}  // namespace

std::optional<Url> Url::parse(std::string_view text) { return from_reference(split(clean_reference(text))); }

std::string Url::to_string() const {
  std::string out = scheme + "://";
  if (!userinfo.empty()) out += userinfo + "@";
  out += host;
  if (port) out += ":" + std::to_string(*port);
  out += path;
  if (query) out += "?" + *query;
  if (fragment) out += "#" + *fragment;
  return out;
}

int Url::effective_port() const {
  if (port) return *port;
  return scheme == "https" ? 443 : 80;
}

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (port) out += ":" + std::to_string(*port);
  return out;
}

std::string Url::path_and_query() const {
  std::string out = path.empty() ? "/" : path;
  if (query) out += "?" + *query;
  return out;
}

std::optional<Url> resolve_reference(const Url& base, std::string_view reference) {
  const Reference r = split(clean_reference(reference));
  Reference t;
  if (r.scheme) {
    t.scheme = r.scheme;
    t.authority = r.authority;
    t.path = remove_dot_segments(r.path);
    t.query = r.query;
  } else {
    t.scheme = base.scheme;
    if (r.authority) {
      t.authority = r.authority;
      t.path = remove_dot_segments(r.path);
      t.query = r.query;
    } else {
      std::string auth = base.userinfo.empty() ? "" : base.userinfo + "@";
      auth += base.host;
      if (base.port) auth += ":" + std::to_string(*base.port);
      t.authority = auth;
      if (r.path.empty()) {
        t.path = base.path;
        t.query = r.query ? r.query : base.query;
      } else {
        if (r.path.front() == '/') {
          t.path = remove_dot_segments(r.path);
        } else {
          std::string merged;
          if (base.path.empty()) {
            merged = "/" + r.path;
          } else {
            merged = base.path.substr(0, base.path.rfind('/') + 1) + r.path;
          }
          t.path = remove_dot_segments(merged);
        }
        t.query = r.query;
      }
    }
  }
  t.fragment = r.fragment;
  return from_reference(t);
}

Url normalize(Url url) {
  url.scheme = to_lower_ascii(url.scheme);
  url.host = to_lower_ascii(url.host);
  url.fragment.reset();
  if (url.port && ((url.scheme == "http" && *url.port == 80) || (url.scheme == "https" && *url.port == 443))) {
    url.port.reset();
  }
  if (url.path.empty()) url.path = "/";
  return url;
}

bool is_absolute_http_url(std::string_view text) {
  const auto u = Url::parse(text);
  return u && u->is_http() && !u->host.empty();
}

}  // namespace compass
