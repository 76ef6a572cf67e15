#include "camscout/linkmodel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "camscout/error.hpp"

namespace camscout {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view last_segment(std::string_view path) {
  std::size_t slash = path.rfind('/');
  return slash == std::string_view::npos ? path : path.substr(slash + 1);
}

std::string_view extension_of(std::string_view segment) {
  std::size_t dot = segment.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return {};
  return segment.substr(dot + 1);
}

template <std::size_t N>
bool one_of(std::string_view value, const std::array<std::string_view, N>& set) {
  return std::find(set.begin(), set.end(), value) != set.end();
}

constexpr std::array<std::string_view, 3> kImageExt{"jpg", "jpeg", "png"};
constexpr std::array<std::string_view, 2> kHlsExt{"m3u", "m3u8"};
constexpr std::array<std::string_view, 2> kMjpgExt{"mjpg", "mjpeg"};
// Assets that are neither pages nor candidate camera data. Anything else on
// http(s) is treated as a page.
constexpr std::array<std::string_view, 24> kAssetExt{
    "gif", "bmp", "webp", "svg", "ico", "tif", "tiff", "css", "js",  "mp4",  "webm", "avi",
    "mov", "mkv", "flv", "mp3", "wav", "pdf", "zip", "gz",  "woff", "woff2", "ttf", "exe"};

const std::vector<std::string>& builtin_suffixes() {
  static const std::vector<std::string> table = [] {
    std::vector<std::string> v{
        "com",    "org",    "net",    "edu",    "gov",    "mil",    "int",    "info",
        "biz",    "io",     "us",     "uk",     "co.uk",  "org.uk", "gov.uk", "ac.uk",
        "ca",     "gc.ca",  "au",     "com.au", "gov.au", "de",     "fr",     "it",
        "es",     "nl",     "be",     "ch",     "at",     "se",     "no",     "fi",
        "dk",     "pl",     "cz",     "ru",     "jp",     "co.jp",  "cn",     "com.cn",
        "in",     "co.in",  "br",     "com.br", "gov.br", "mx",     "gob.mx", "za",
        "co.za",  "nz",     "co.nz",  "govt.nz", "kr",    "co.kr",  "tw",     "com.tw",
        "eu",     "tv",     "me",     "state.us", "ny.us", "ca.us", "tx.us", "example",
        "test",   "local",  "invalid", "localhost"};
    std::sort(v.begin(), v.end());
    return v;
  }();
  return table;
}

bool is_ip_literal(std::string_view host) {
  if (host.starts_with('[')) return true;
  return !host.empty() && std::all_of(host.begin(), host.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  });
}

}  // namespace

std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::Image: return "Image";
    case LinkKind::Stream: return "Stream";
    case LinkKind::Page: return "Page";
    case LinkKind::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(StreamKind kind) {
  switch (kind) {
    case StreamKind::HLS: return "HLS";
    case StreamKind::MJPG: return "MJPG";
    case StreamKind::RTMP: return "RTMP";
    case StreamKind::RTSP: return "RTSP";
  }
  return "HLS";
}

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::HtmlEmbed ? "HtmlEmbed" : "XhrPayload";
}

LinkKind link_kind_from_string(std::string_view text) {
  if (text == "Image") return LinkKind::Image;
  if (text == "Stream") return LinkKind::Stream;
  if (text == "Page") return LinkKind::Page;
  if (text == "Other") return LinkKind::Other;
  throw Error(ErrorKind::InvalidConfig, "unknown link kind '" + std::string(text) + "'");
}

StreamKind stream_kind_from_string(std::string_view text) {
  if (text == "HLS") return StreamKind::HLS;
  if (text == "MJPG") return StreamKind::MJPG;
  if (text == "RTMP") return StreamKind::RTMP;
  if (text == "RTSP") return StreamKind::RTSP;
  throw Error(ErrorKind::InvalidConfig, "unknown stream kind '" + std::string(text) + "'");
}

Provenance provenance_from_string(std::string_view text) {
  if (text == "HtmlEmbed") return Provenance::HtmlEmbed;
  if (text == "XhrPayload") return Provenance::XhrPayload;
  throw Error(ErrorKind::InvalidConfig, "unknown provenance '" + std::string(text) + "'");
}

LinkClass classify_link(const Url& url, const ClassifyOptions& options) {
  if (url.scheme == "rtsp" || url.scheme == "rtsps") return {LinkKind::Stream, StreamKind::RTSP};
  if (url.scheme.starts_with("rtmp")) return {LinkKind::Stream, StreamKind::RTMP};
  if (!url.is_http()) return {LinkKind::Other, std::nullopt};

  const std::string segment = lower(last_segment(url.path));
  const std::string_view ext = extension_of(segment);
  if (one_of(ext, kImageExt)) return {LinkKind::Image, std::nullopt};
  if (one_of(ext, kHlsExt)) return {LinkKind::Stream, StreamKind::HLS};
  if (one_of(ext, kMjpgExt)) return {LinkKind::Stream, StreamKind::MJPG};
  if (options.mjpg_segment_heuristic && ext.empty() && segment.find("mjpg") != std::string::npos)
    return {LinkKind::Stream, StreamKind::MJPG};
  if (one_of(ext, kAssetExt)) return {LinkKind::Other, std::nullopt};
  return {LinkKind::Page, std::nullopt};
}

LinkClass classify_link(std::string_view url, const ClassifyOptions& options) {
  return classify_link(Url::parse(url), options);
}

std::string canonicalize(const Url& url, LinkKind kind) {
  Url key = url;
  key.fragment.reset();
  if (key.port && key.port == default_port(key.scheme)) key.port.reset();
  if (key.is_http() && key.path.empty()) key.path = "/";
  key.path = normalize_percent_encoding(key.path);
  if (kind == LinkKind::Image) {
    key.query.reset();
  } else if (key.query) {
    key.query = normalize_percent_encoding(*key.query);
  }
  return key.to_string();
}

std::string canonicalize(std::string_view url, LinkKind kind) {
  return canonicalize(Url::parse(url), kind);
}

SuffixTable::SuffixTable() : suffixes_(builtin_suffixes()) {}

SuffixTable::SuffixTable(std::vector<std::string> suffixes) : suffixes_(std::move(suffixes)) {
  for (auto& s : suffixes_) s = lower(s);
  std::sort(suffixes_.begin(), suffixes_.end());
  suffixes_.erase(std::unique(suffixes_.begin(), suffixes_.end()), suffixes_.end());
}

SuffixTable SuffixTable::parse(std::string_view text) {
  std::vector<std::string> suffixes;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string suffix = line.substr(first, last - first + 1);
    if (suffix.starts_with('.')) suffix.erase(0, 1);
    if (!suffix.empty()) suffixes.push_back(suffix);
  }
  return SuffixTable(std::move(suffixes));
}

SuffixTable SuffixTable::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read suffix table " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool SuffixTable::is_suffix(std::string_view domain) const {
  return std::binary_search(suffixes_.begin(), suffixes_.end(), domain);
}

std::string SuffixTable::registrable_domain(std::string_view host_in) const {
  std::string host = lower(host_in);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (is_ip_literal(host) || host.find('.') == std::string::npos) return host;
  // Longest matching suffix wins; the registrable domain is one label more.
  std::size_t pos = 0;
  std::string_view view = host;
  std::optional<std::size_t> label_start_before_suffix;
  std::size_t prev = std::string::npos;
  while (true) {
    std::string_view candidate = view.substr(pos);
    if (is_suffix(candidate)) {
      label_start_before_suffix = prev;
      break;
    }
    std::size_t dot = view.find('.', pos);
    if (dot == std::string_view::npos) break;
    prev = pos;
    pos = dot + 1;
  }
  if (!label_start_before_suffix) {
    // Unknown TLD: fall back to the last two labels.
    std::size_t last = host.rfind('.');
    std::size_t second = host.rfind('.', last - 1);
    return second == std::string::npos ? host : host.substr(second + 1);
  }
  if (*label_start_before_suffix == std::string::npos) return host;  // host is itself a suffix
  return host.substr(*label_start_before_suffix);
}

const SuffixTable& default_suffix_table() {
  static const SuffixTable table;
  return table;
}

bool same_domain(const Url& url, std::string_view seed_domain) {
  if (url.host.empty() || seed_domain.empty()) return false;
  std::string host = lower(url.host);
  std::string seed = lower(seed_domain);
  while (!host.empty() && host.back() == '.') host.pop_back();
  while (!seed.empty() && seed.back() == '.') seed.pop_back();
  if (host == seed) return true;
  return host.size() > seed.size() && host.ends_with(seed) &&
         host[host.size() - seed.size() - 1] == '.';
}

bool same_domain(std::string_view url, std::string_view seed_domain) {
  return same_domain(Url::parse(url), seed_domain);
}

std::optional<DataLink> make_data_link(const Url& url, Provenance provenance,
                                       std::string_view source_page,
                                       const ClassifyOptions& options) {
  LinkClass cls = classify_link(url, options);
  if (!cls.is_data()) return std::nullopt;
  DataLink link;
  Url raw = url;
  raw.fragment.reset();
  link.raw_url = raw.to_string();
  link.canonical_key = canonicalize(url, cls.kind);
  link.kind = cls.kind;
  link.stream_kind = cls.stream_kind;
  link.provenance = provenance;
  link.source_page = std::string(source_page);
  return link;
}

}  // namespace camscout
