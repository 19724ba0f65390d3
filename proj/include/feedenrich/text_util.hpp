#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace feedenrich {

std::string to_lower_ascii(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

// HTML whitespace: space, tab, LF, FF, CR.
bool is_space(char c);
std::string_view trim(std::string_view s);

// Runs of whitespace become one space; leading/trailing whitespace removed.
// U+00A0 (no-break space) counts as whitespace.
std::string collapse_whitespace(std::string_view s);

// Number of Unicode code points in a UTF-8 string. Malformed sequences count
// one per byte.
std::size_t utf8_length(std::string_view s);
bool is_valid_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);
// Maps ISO-8859-1 / windows-1252 bytes to UTF-8.
std::string latin1_to_utf8(std::string_view s);

std::string xml_escape(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace feedenrich
