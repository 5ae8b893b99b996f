#include "compass/time.hpp"

#include <cstdio>
#include <stdexcept>
#include <thread>

namespace compass {

using namespace std::chrono;

std::string format_timestamp(Timestamp t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()),
                static_cast<int>(hms.subseconds().count()));
  return buf;
}

Timestamp parse_timestamp(std::string_view s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
  const std::string str(s);
  int consumed = 0;
  if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &sec, &consumed) != 6) {
    throw std::invalid_argument("bad timestamp: " + str);
  }
  std::string_view rest = s.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest.front() == '.') {
    if (rest.size() < 4 || std::sscanf(std::string(rest.substr(1, 3)).c_str(), "%3d", &ms) != 1) {
      throw std::invalid_argument("bad timestamp fraction: " + str);
    }
    rest.remove_prefix(4);
  }
  if (rest != "Z") throw std::invalid_argument("timestamp must be UTC ('Z'): " + str);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw std::invalid_argument("bad date in timestamp: " + str);
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{ms};
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Date parse_date(std::string_view s) {
  int y = 0, m = 0, d = 0;
  int consumed = 0;
  const std::string str(s);
  if (std::sscanf(str.c_str(), "%4d-%2d-%2d%n", &y, &m, &d, &consumed) != 3 ||
      static_cast<std::size_t>(consumed) != str.size()) {
    throw std::invalid_argument("bad date: " + str);
  }
  const Date out{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!out.ok()) throw std::invalid_argument("bad date: " + str);
  return out;
}

Date utc_date(Timestamp t) { return Date{floor<days>(t)}; }

Timestamp start_of_day(Date d) { return Timestamp{sys_days{d}}; }

Timestamp SystemClock::now() const { return time_point_cast<milliseconds>(system_clock::now()); }

void SystemClock::sleep_for(milliseconds d) { std::this_thread::sleep_for(d); }

}  // namespace compass
