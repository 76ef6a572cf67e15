#include "camscout/url.hpp"

#include <algorithm>
#include <cctype>

#include "camscout/error.hpp"

namespace camscout {

namespace {

struct RefParts {
  std::optional<std::string> scheme;
  bool has_authority = false;
  std::string authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

bool is_scheme_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

std::string_view trim(std::string_view s) {
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; };
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

RefParts split_reference(std::string_view text) {
  RefParts parts;
  std::size_t colon = text.find(':');
  std::size_t first_delim = text.find_first_of("/?#");
  if (colon != std::string_view::npos && colon > 0 &&
      (first_delim == std::string_view::npos || colon < first_delim) &&
      std::isalpha(static_cast<unsigned char>(text[0])) &&
      std::all_of(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(colon), is_scheme_char)) {
    parts.scheme = to_lower(text.substr(0, colon));
    text.remove_prefix(colon + 1);
  }
  if (text.starts_with("//")) {
    text.remove_prefix(2);
    std::size_t end = text.find_first_of("/?#");
    parts.has_authority = true;
    parts.authority = std::string(text.substr(0, end));
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end);
  }
  std::size_t hash = text.find('#');
  if (hash != std::string_view::npos) {
    parts.fragment = std::string(text.substr(hash + 1));
    text = text.substr(0, hash);
  }
  std::size_t q = text.find('?');
  if (q != std::string_view::npos) {
    parts.query = std::string(text.substr(q + 1));
    text = text.substr(0, q);
  }
  parts.path = std::string(text);
  return parts;
}

bool valid_host_char(char c) {
  auto u = static_cast<unsigned char>(c);
  if (u >= 0x80) return true;  // IDN passes through untouched
  return std::isalnum(u) || c == '-' || c == '.' || c == '_' || c == '~' || c == '%' || c == '[' ||
         c == ']' || c == ':' || c == '!' || c == '$' || c == '&' || c == '\'' || c == '(' ||
         c == ')' || c == '*' || c == '+' || c == ',' || c == ';' || c == '=';
}

void parse_authority(std::string_view authority, Url& url) {
  std::size_t at = authority.rfind('@');
  if (at != std::string_view::npos) {
    url.userinfo = std::string(authority.substr(0, at));
    authority.remove_prefix(at + 1);
  }
  std::string_view host = authority;
  std::string_view port;
  if (authority.starts_with('[')) {
    std::size_t close = authority.find(']');
    if (close == std::string_view::npos) throw Error(ErrorKind::MalformedUrl, "unterminated IPv6 host");
    host = authority.substr(0, close + 1);
    std::string_view rest = authority.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':') throw Error(ErrorKind::MalformedUrl, "junk after IPv6 host");
      port = rest.substr(1);
    }
  } else {
    std::size_t c = authority.rfind(':');
    if (c != std::string_view::npos) {
      host = authority.substr(0, c);
      port = authority.substr(c + 1);
    }
  }
  if (!std::all_of(host.begin(), host.end(), valid_host_char))
    throw Error(ErrorKind::MalformedUrl, "invalid character in host '" + std::string(host) + "'");
  url.host = to_lower(host);
  if (!port.empty()) {
    if (port.size() > 5 || !std::all_of(port.begin(), port.end(),
                                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw Error(ErrorKind::MalformedUrl, "invalid port '" + std::string(port) + "'");
    int value = std::stoi(std::string(port));
    if (value > 65535) throw Error(ErrorKind::MalformedUrl, "port out of range");
    url.port = value;
  }
}

bool requires_host(std::string_view scheme) {
  return scheme == "http" || scheme == "https" || scheme == "rtsp" || scheme == "rtmp" ||
         scheme == "ftp";
}

Url build(const RefParts& parts) {
  if (!parts.scheme) throw Error(ErrorKind::MalformedUrl, "missing scheme");
  Url url;
  url.scheme = *parts.scheme;
  url.has_authority = parts.has_authority;
  if (parts.has_authority) parse_authority(parts.authority, url);
  url.path = parts.path;
  url.query = parts.query;
  url.fragment = parts.fragment;
  if (requires_host(url.scheme) && url.host.empty())
    throw Error(ErrorKind::MalformedUrl, "missing host for " + url.scheme + " URL");
  for (char c : url.path) {
    if (c == ' ' || c == '<' || c == '>' || c == '"' || static_cast<unsigned char>(c) < 0x20)
      throw Error(ErrorKind::MalformedUrl, "invalid character in path");
  }
  return url;
}

std::string merge_paths(const Url& base, std::string_view ref_path) {
  if (base.has_authority && base.path.empty()) return "/" + std::string(ref_path);
  std::size_t slash = base.path.rfind('/');
  if (slash == std::string::npos) return std::string(ref_path);
  return base.path.substr(0, slash + 1) + std::string(ref_path);
}

bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

Url Url::parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw Error(ErrorKind::MalformedUrl, "empty URL");
  return build(split_reference(text));
}

std::optional<Url> Url::try_parse(std::string_view text) {
  try {
    return parse(text);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string Url::to_string() const {
  std::string out = scheme + ":";
  if (has_authority) {
    out += "//";
    if (userinfo) out += *userinfo + "@";
    out += host;
    if (port) out += ":" + std::to_string(*port);
  }
  out += path;
  if (query) out += "?" + *query;
  if (fragment) out += "#" + *fragment;
  return out;
}

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (port && port != default_port(scheme)) out += ":" + std::to_string(*port);
  return out;
}

std::string Url::path_and_query() const {
  std::string out = path.empty() ? "/" : path;
  if (query) out += "?" + *query;
  return out;
}

std::string remove_dot_segments(std::string_view input) {
  std::string in(input);
  std::string out;
  while (!in.empty()) {
    if (in.starts_with("../")) {
      in.erase(0, 3);
    } else if (in.starts_with("./")) {
      in.erase(0, 2);
    } else if (in.starts_with("/./")) {
      in.erase(0, 2);
    } else if (in == "/.") {
      in = "/";
    } else if (in.starts_with("/../") || in == "/..") {
      in = in.size() == 3 ? std::string("/") : in.substr(3);
      std::size_t slash = out.rfind('/');
      out.erase(slash == std::string::npos ? 0 : slash);
    } else if (in == "." || in == "..") {
      in.clear();
    } else {
      std::size_t start = in.front() == '/' ? 1 : 0;
      std::size_t next = in.find('/', start);
      if (next == std::string::npos) next = in.size();
      out += in.substr(0, next);
      in.erase(0, next);
    }
  }
  return out;
}

Url resolve(const Url& base, std::string_view reference) {
  reference = trim(reference);
  RefParts ref = split_reference(reference);
  RefParts target;
  if (ref.scheme) {
    target = ref;
    target.path = remove_dot_segments(ref.path);
  } else {
    target.scheme = base.scheme;
    if (ref.has_authority) {
      target.has_authority = true;
      target.authority = ref.authority;
      target.path = remove_dot_segments(ref.path);
      target.query = ref.query;
    } else {
      target.has_authority = base.has_authority;
      std::string authority;
      if (base.userinfo) authority += *base.userinfo + "@";
      authority += base.host;
      if (base.port) authority += ":" + std::to_string(*base.port);
      target.authority = authority;
      if (ref.path.empty()) {
        target.path = base.path;
        target.query = ref.query ? ref.query : base.query;
      } else {
        target.path = ref.path.front() == '/' ? remove_dot_segments(ref.path)
                                              : remove_dot_segments(merge_paths(base, ref.path));
        target.query = ref.query;
      }
    }
  }
  target.fragment = ref.fragment;
  target.path = normalize_percent_encoding(target.path);
  if (target.query) target.query = normalize_percent_encoding(*target.query);
  return build(target);
}

std::optional<Url> try_resolve(const Url& base, std::string_view reference) {
  try {
    return resolve(base, reference);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<int> default_port(std::string_view scheme) {
  if (scheme == "http") return 80;
  if (scheme == "https") return 443;
  if (scheme == "rtsp") return 554;
  if (scheme == "rtmp") return 1935;
  if (scheme == "ftp") return 21;
  return std::nullopt;
}

std::string normalize_percent_encoding(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto c = static_cast<unsigned char>(text[i]);
    if (c == '%' && i + 2 < text.size() && is_hex(text[i + 1]) && is_hex(text[i + 2])) {
      out += '%';
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(text[i + 1])));
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(text[i + 2])));
      i += 2;
    } else if (c <= 0x20 || c >= 0x7f || c == '"' || c == '<' || c == '>') {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xf];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

}  // namespace camscout
