#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace compass::csv {

struct Row {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. Accepts LF or CRLF endings and skips a leading UTF-8 BOM. Blank
/// lines are ignored. Throws std::invalid_argument on an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes only when the field needs it.
std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

}  // namespace compass::csv
