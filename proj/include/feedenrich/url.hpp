#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace feedenrich {

// Parsed absolute http(s) URL. Components are stored as they appear in the
// source except scheme and host, which are lowercased.
struct Url {
  std::string scheme;
  std::string host;
  int port = 0;          // 0 = scheme default
  std::string path;      // always begins with '/'
  std::string query;     // without '?'
  std::string fragment;  // without '#'

  int effective_port() const;
  // "host:port", the key used for per-host politeness accounting.
  std::string host_key() const;
  // path plus "?query" when present; what goes on the HTTP request line.
  std::string request_target() const;
  std::string str() const;

  bool operator==(const Url&) const = default;
};

// Parses an absolute http or https URL; nullopt for anything else.
std::optional<Url> parse_url(std::string_view text);

bool is_absolute_url(std::string_view text);

// RFC 3986 reference resolution. Returns nullopt when the result is not an
// http(s) URL (mailto:, javascript:, data:, ...).
std::optional<Url> resolve_url(const Url& base, std::string_view reference);
std::optional<std::string> resolve_url_string(std::string_view base, std::string_view reference);

// Removes "." and ".." segments.
std::string remove_dot_segments(std::string_view path);

}  // namespace feedenrich
