#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camscout/url.hpp"

namespace camscout {

using Timestamp = std::chrono::system_clock::time_point;

enum class LinkKind { Image, Stream, Page, Other };
enum class StreamKind { HLS, MJPG, RTMP, RTSP };
enum class Provenance { HtmlEmbed, XhrPayload };

// Result of classifying one URL. stream_kind is set iff kind == Stream.
struct LinkClass {
  LinkKind kind = LinkKind::Other;
  std::optional<StreamKind> stream_kind;

  bool is_data() const { return kind == LinkKind::Image || kind == LinkKind::Stream; }
  friend bool operator==(const LinkClass&, const LinkClass&) = default;
};

struct ClassifyOptions {
  // Treat an extensionless last path segment containing "mjpg" as an MJPG
  // stream (e.g. /axis-cgi/mjpg/video.cgi, /videostream.mjpg?x).
  bool mjpg_segment_heuristic = true;
};

std::string_view to_string(LinkKind kind);
std::string_view to_string(StreamKind kind);
std::string_view to_string(Provenance provenance);
LinkKind link_kind_from_string(std::string_view text);
StreamKind stream_kind_from_string(std::string_view text);
Provenance provenance_from_string(std::string_view text);

LinkClass classify_link(const Url& url, const ClassifyOptions& options = {});
// Parses first; throws Error(MalformedUrl).
LinkClass classify_link(std::string_view url, const ClassifyOptions& options = {});

// Dedup key: fragment dropped, scheme/host lowercased, default port removed,
// percent escapes uppercased, and for images the whole query string removed.
std::string canonicalize(const Url& url, LinkKind kind);
std::string canonicalize(std::string_view url, LinkKind kind);

// Public suffixes used to find the registrable domain of a host. The built-in
// table is deliberately small; load_file() accepts one suffix per line with
// '#' comments.
class SuffixTable {
 public:
  SuffixTable();  // built-in defaults
  explicit SuffixTable(std::vector<std::string> suffixes);
  static SuffixTable load_file(const std::filesystem::path& path);
  static SuffixTable parse(std::string_view text);

  bool is_suffix(std::string_view domain) const;
  // "www.cams.example.co.uk" -> "example.co.uk". IP literals and single
  // labels are returned unchanged.
  std::string registrable_domain(std::string_view host) const;

 private:
  std::vector<std::string> suffixes_;  // sorted
};

const SuffixTable& default_suffix_table();

// True iff the host of `url` equals `seed_domain` or ends with "." +
// seed_domain, compared label-wise.
bool same_domain(const Url& url, std::string_view seed_domain);
bool same_domain(std::string_view url, std::string_view seed_domain);

struct DataLink {
  std::string raw_url;
  std::string canonical_key;
  LinkKind kind = LinkKind::Image;
  std::optional<StreamKind> stream_kind;
  Provenance provenance = Provenance::HtmlEmbed;
  std::string source_page;
  std::string seed_domain;
  Timestamp discovered_at{};
  int depth = 0;

  friend bool operator==(const DataLink&, const DataLink&) = default;
};

// Builds a DataLink from an absolute URL that classifies as Image or Stream.
// Returns nullopt for pages and other kinds.
std::optional<DataLink> make_data_link(const Url& url, Provenance provenance,
                                       std::string_view source_page,
                                       const ClassifyOptions& options = {});

}  // namespace camscout
