#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace compass {

/// Allow/Disallow rules from robots.txt for one user agent. Matching follows
/// the common convention: longest matching rule wins, Allow wins ties, `*`
/// matches any run of characters and a trailing `$` anchors the end.
class RobotsPolicy {
 public:
  RobotsPolicy() = default;  // allows everything

  /// Picks the group whose User-agent token occurs in `user_agent`
  /// (case-insensitive, longest token wins), falling back to `*`.
  static RobotsPolicy parse(std::string_view robots_txt, std::string_view user_agent);

  bool allowed(std::string_view path_and_query) const;

 private:
  struct Rule {
    std::string pattern;
    bool allow = false;
  };
  std::vector<Rule> rules_;
};

}  // namespace compass
