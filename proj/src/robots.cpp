#include "compass/robots.hpp"

#include <sstream>

#include "compass/text.hpp"

namespace compass {
namespace {

bool matches(std::string_view pattern, std::string_view path) {
  const bool anchored = !pattern.empty() && pattern.back() == '$';
  if (anchored) pattern.remove_suffix(1);
  // Iterative wildcard match with backtracking on the last '*'.
  std::size_t p = 0, s = 0, star = std::string_view::npos, mark = 0;
  while (s < path.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = s;
    } else if (p < pattern.size() && pattern[p] == path[s]) {
      ++p, ++s;
    } else if (p == pattern.size() && !anchored) {
      return true;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      s = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace

RobotsPolicy RobotsPolicy::parse(std::string_view robots_txt, std::string_view user_agent) {
  struct Group {
    std::vector<std::string> agents;
    std::vector<Rule> rules;
  };
  std::vector<Group> groups;
  bool last_was_agent = false;
  std::istringstream in{std::string(robots_txt)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = to_lower_ascii(trim(line.substr(0, colon)));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "user-agent") {
      if (!last_was_agent) groups.emplace_back();
      groups.back().agents.push_back(to_lower_ascii(value));
      last_was_agent = true;
    } else if (key == "allow" || key == "disallow") {
      last_was_agent = false;
      if (groups.empty()) continue;
      if (value.empty()) continue;  // "Disallow:" with no path allows everything
      groups.back().rules.push_back(Rule{value, key == "allow"});
    } else {
      last_was_agent = false;
    }
  }

  const std::string ua = to_lower_ascii(user_agent);
  const Group* best = nullptr;
  std::size_t best_len = 0;
  const Group* star = nullptr;
  for (const auto& g : groups) {
    for (const auto& a : g.agents) {
      if (a == "*") {
        if (!star) star = &g;
      } else if (!a.empty() && ua.find(a) != std::string::npos && a.size() > best_len) {
        best = &g;
        best_len = a.size();
      }
    }
  }
  RobotsPolicy policy;
  if (const Group* g = best ? best : star) policy.rules_ = g->rules;
  return policy;
}

bool RobotsPolicy::allowed(std::string_view path_and_query) const {
  const Rule* winner = nullptr;
  for (const auto& r : rules_) {
    if (!matches(r.pattern, path_and_query)) continue;
    if (!winner || r.pattern.size() > winner->pattern.size() ||
        (r.pattern.size() == winner->pattern.size() && r.allow && !winner->allow)) {
      winner = &r;
    }
  }
  return !winner || winner->allow;
}

}  // namespace compass
