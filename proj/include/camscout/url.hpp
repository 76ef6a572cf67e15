#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace camscout {

// RFC 3986 reference split into components. Opaque URLs (mailto:, data:,
// javascript:) have no authority and keep everything after the colon in path.
struct Url {
  std::string scheme;  // lowercase
  std::optional<std::string> userinfo;
  std::string host;  // empty when there is no authority
  std::optional<int> port;
  bool has_authority = false;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  // Parses an absolute URL. Throws Error(MalformedUrl).
  static Url parse(std::string_view text);
  // Returns nullopt instead of throwing.
  static std::optional<Url> try_parse(std::string_view text);

  std::string to_string() const;
  // scheme://host[:port]
  std::string origin() const;
  // path plus "?query", the form robots.txt rules match against.
  std::string path_and_query() const;

  bool is_http() const { return scheme == "http" || scheme == "https"; }

  friend bool operator==(const Url&, const Url&) = default;
};

// Resolves `reference` against `base` (RFC 3986 section 5.2). Throws
// Error(MalformedUrl) if the result is not a valid absolute URL.
Url resolve(const Url& base, std::string_view reference);
std::optional<Url> try_resolve(const Url& base, std::string_view reference);

// RFC 3986 dot-segment removal.
std::string remove_dot_segments(std::string_view path);

std::optional<int> default_port(std::string_view scheme);

// Uppercases the hex digits of every %XX escape and escapes bytes that may
// not appear raw (space, controls, non-ASCII).
std::string normalize_percent_encoding(std::string_view text);

}  // namespace camscout
