#pragma once

#include <json.hpp>

#include <mutex>
#include <ostream>
#include <string_view>
#include <vector>

#include "compass/time.hpp"

namespace compass {

/// Structured log: one JSON object per line, {"at", "event", ...fields}.
/// Thread-safe. Keeps a copy of every event when `capture` is set.
class EventLog {
 public:
  EventLog(std::ostream* sink, const Clock& clock, bool capture = false)
      : sink_(sink), clock_(clock), capture_(capture) {}

  void emit(std::string_view event, nlohmann::json fields = nlohmann::json::object());
  std::vector<nlohmann::json> captured() const;
  std::size_t count(std::string_view event) const;

 private:
  std::ostream* sink_;
  const Clock& clock_;
  bool capture_;
  mutable std::mutex mu_;
  std::vector<nlohmann::json> events_;
};

}  // namespace compass
