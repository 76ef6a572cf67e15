#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camscout/fetcher.hpp"
#include "camscout/linkmodel.hpp"

namespace camscout {

// Links found on one page or payload, in discovery order, without
// duplicates (pages by canonical page key, data links by canonical_key).
struct ExtractionResult {
  std::vector<std::string> page_links;
  std::vector<DataLink> data_links;

  void add_page(const Url& url);
  void add_data(DataLink link);
  void merge(const ExtractionResult& other);
};

enum class PayloadType { Json, GeoJson, Xml };

// Decides whether an XHR response is a map/database payload worth scanning,
// from the request URL suffix first and the content type second.
std::optional<PayloadType> xhr_payload_type(std::string_view request_url, std::string_view content_type);

// <a>/<area> hrefs become page links when they classify as Page; img, video,
// source, iframe and embed sources plus hrefs that classify as Image or
// Stream become data links. Honors <base href>. Never throws on bad markup.
ExtractionResult extract_html_links(const RenderedPage& page, const ClassifyOptions& options = {});

// Recursively scans a JSON/GeoJSON/XML payload for URL-shaped strings.
// Unparseable payloads yield an empty result.
ExtractionResult extract_xhr_links(std::string_view request_url, std::string_view content_type,
                                   std::string_view body, std::string_view source_page,
                                   const ClassifyOptions& options = {});

// Both channels for a rendered page.
ExtractionResult extract_all(const RenderedPage& page, const ClassifyOptions& options = {});

}  // namespace camscout
