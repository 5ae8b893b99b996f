#include "compass/event_log.hpp"

#include <algorithm>

namespace compass {

void EventLog::emit(std::string_view event, nlohmann::json fields) {
  if (!fields.is_object()) fields = nlohmann::json{{"detail", std::move(fields)}};
  fields["at"] = format_timestamp(clock_.now());
  fields["event"] = event;
  std::lock_guard lock(mu_);
  if (sink_) *sink_ << fields.dump() << '\n' << std::flush;
  if (capture_) events_.push_back(std::move(fields));
}

std::vector<nlohmann::json> EventLog::captured() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::size_t EventLog::count(std::string_view event) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [&](const nlohmann::json& j) {
    return j.value("event", "") == event;
  }));
}

}  // namespace compass
