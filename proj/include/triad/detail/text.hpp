#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace triad::detail {

/// Decode backslash escapes inside a quoted string body (ECHAR + \uXXXX /
/// \UXXXXXXXX, emitted as UTF-8). Returns nullopt on a malformed escape.
std::optional<std::string> unescape_quoted(std::string_view body);

/// Collapse runs of whitespace to single spaces and trim both ends.
std::string collapse_ws(std::string_view s);

std::string to_lower(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Find `needle` in `haystack` ignoring ASCII case; npos when absent.
std::size_t find_ci(std::string_view haystack, std::string_view needle);

void append_utf8(std::string& out, unsigned long codepoint);

}  // namespace triad::detail
