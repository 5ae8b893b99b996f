#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace compass {

/// Number of Unicode scalar values in a UTF-8 string. Invalid sequences count
/// one per offending byte, so the result is never larger than the byte count.
std::size_t utf8_length(std::string_view s);

/// Appends the UTF-8 encoding of a code point (invalid code points become U+FFFD).
void append_utf8(std::string& out, char32_t cp);

/// Collapses runs of whitespace (ASCII whitespace and U+00A0) to one space and trims.
std::string collapse_whitespace(std::string_view s);

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool iequals_ascii(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);

/// Lowercase hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

/// First eight bytes of SHA-256 as a big-endian integer.
std::uint64_t sha256_u64(std::string_view data);

/// ASCII slug: common Latin accents folded, other characters collapsed to '-'.
std::string slugify(std::string_view s);

/// Random 128-bit token as 32 hex chars, from the OS CSPRNG.
std::string random_token_hex();

}  // namespace compass
