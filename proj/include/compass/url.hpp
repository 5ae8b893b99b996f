#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace compass {

/// Absolute URL split into RFC 3986 components.
struct Url {
  std::string scheme;  // lowercase
  std::string userinfo;
  std::string host;
  std::optional<int> port;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  /// Absolute URLs with a non-empty authority only; nullopt otherwise.
  static std::optional<Url> parse(std::string_view text);

  std::string to_string() const;
  bool is_http() const { return scheme == "http" || scheme == "https"; }
  int effective_port() const;
  /// "https://host[:port]"
  std::string origin() const;
  /// Path (at least "/") plus "?query" when present.
  std::string path_and_query() const;

  friend bool operator==(const Url&, const Url&) = default;
};

/// Resolves an href against a base URL (RFC 3986 section 5.2), including
/// dot-segment removal. Returns nullopt when the result is not a valid absolute URL.
std::optional<Url> resolve_reference(const Url& base, std::string_view reference);

/// Canonical form used for de-duplication: lowercase scheme and host, fragment
/// removed, default port dropped, empty path becomes "/", query kept verbatim.
Url normalize(Url url);

/// True for absolute http(s) URLs with a host.
bool is_absolute_http_url(std::string_view text);

}  // namespace compass
