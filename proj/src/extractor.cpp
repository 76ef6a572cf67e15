#include "camscout/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "camscout/html.hpp"

namespace camscout {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

// Strings inside payloads that could be links. Absolute URLs must carry a
// scheme we can classify; relative ones need at least 4 chars and a '/'.
std::optional<Url> payload_string_to_url(std::string_view s, const Url& base) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty() || has_whitespace(s)) return std::nullopt;
  if (auto abs = Url::try_parse(s); abs && abs->has_authority) return abs;
  if (s.size() < 4 || s.find('/') == std::string_view::npos) return std::nullopt;
  if (s.find("://") != std::string_view::npos) return std::nullopt;
  return try_resolve(base, s);
}

void collect_url(const Url& url, Provenance provenance, std::string_view source_page,
                 const ClassifyOptions& options, ExtractionResult& out) {
  LinkClass cls = classify_link(url, options);
  if (cls.kind == LinkKind::Page) {
    out.add_page(url);
  } else if (cls.is_data()) {
    if (auto link = make_data_link(url, provenance, source_page, options)) out.add_data(*link);
  }
}

void walk_json(const nlohmann::json& node, const std::function<void(const std::string&)>& visit) {
  if (node.is_string()) {
    visit(node.get_ref<const std::string&>());
  } else if (node.is_object() || node.is_array()) {
    for (const auto& child : node) walk_json(child, visit);
  }
}

}  // namespace

void ExtractionResult::add_page(const Url& url) {
  std::string key = canonicalize(url, LinkKind::Page);
  if (std::find(page_links.begin(), page_links.end(), key) == page_links.end())
    page_links.push_back(std::move(key));
}

void ExtractionResult::add_data(DataLink link) {
  auto same = [&](const DataLink& d) { return d.canonical_key == link.canonical_key; };
  if (std::none_of(data_links.begin(), data_links.end(), same)) data_links.push_back(std::move(link));
}

void ExtractionResult::merge(const ExtractionResult& other) {
  for (const auto& p : other.page_links)
    if (std::find(page_links.begin(), page_links.end(), p) == page_links.end()) page_links.push_back(p);
  for (const auto& d : other.data_links) add_data(d);
}

std::optional<PayloadType> xhr_payload_type(std::string_view request_url, std::string_view content_type) {
  if (auto url = Url::try_parse(request_url)) {
    std::string path = lower(url->path);
    if (path.ends_with(".geojson")) return PayloadType::GeoJson;
    if (path.ends_with(".json")) return PayloadType::Json;
    if (path.ends_with(".xml") || path.ends_with(".kml") || path.ends_with(".rss"))
      return PayloadType::Xml;
  }
  std::string ct = lower(content_type);
  if (ct.find("geo+json") != std::string::npos) return PayloadType::GeoJson;
  if (ct.find("json") != std::string::npos) return PayloadType::Json;
  if (ct.find("xml") != std::string::npos) return PayloadType::Xml;
  return std::nullopt;
}

ExtractionResult extract_html_links(const RenderedPage& page, const ClassifyOptions& options) {
  ExtractionResult out;
  auto page_url = Url::try_parse(page.url);
  if (!page_url) return out;
  Url base = *page_url;
  bool base_seen = false;

  html::tokenize(page.html, [&](const html::Token& tok) {
    if (tok.type != html::Token::Type::StartTag) return;
    const std::string& name = tok.name;
    if (name == "base" && !base_seen) {
      if (const auto* href = tok.attr("href")) {
        if (auto b = try_resolve(*page_url, *href)) {
          base = *b;
          base_seen = true;
        }
      }
      return;
    }
    const std::string* target = nullptr;
    bool anchor = false;
    if (name == "a" || name == "area") {
      target = tok.attr("href");
      anchor = true;
    } else if (name == "img" || name == "video" || name == "source" || name == "iframe" ||
               name == "embed") {
      target = tok.attr("src");
    }
    if (!target || target->empty()) return;
    auto url = try_resolve(base, *target);
    if (!url) return;
    LinkClass cls = classify_link(*url, options);
    if (cls.kind == LinkKind::Page) {
      if (anchor) out.add_page(*url);
    } else if (cls.is_data()) {
      if (auto link = make_data_link(*url, Provenance::HtmlEmbed, page.url, options))
        out.add_data(std::move(*link));
    }
  });
  return out;
}

ExtractionResult extract_xhr_links(std::string_view request_url, std::string_view content_type,
                                   std::string_view body, std::string_view source_page,
                                   const ClassifyOptions& options) {
  ExtractionResult out;
  auto base = Url::try_parse(source_page);
  if (!base) return out;
  auto visit = [&](std::string_view s) {
    if (auto url = payload_string_to_url(s, *base))
      collect_url(*url, Provenance::XhrPayload, source_page, options, out);
  };

  auto type = xhr_payload_type(request_url, content_type);
  if (!type) {
    // Fall back to sniffing the first significant byte.
    auto first = body.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
    if (first != std::string_view::npos && (body[first] == '{' || body[first] == '['))
      type = PayloadType::Json;
    else if (first != std::string_view::npos && body[first] == '<')
      type = PayloadType::Xml;
  }
  if (!type) {
    spdlog::warn("xhr payload from {} has unknown type '{}'; skipped", request_url, content_type);
    return out;
  }

  if (*type == PayloadType::Xml) {
    // Guard against HTML error pages served with an XML suffix.
    auto first = body.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
    if (first == std::string_view::npos || body[first] != '<') {
      spdlog::warn("unparseable XML payload from {}", request_url);
      return out;
    }
    html::tokenize(body, [&](const html::Token& tok) {
      if (tok.type == html::Token::Type::StartTag) {
        for (const auto& a : tok.attributes) visit(a.value);
      } else if (tok.type == html::Token::Type::Text) {
        visit(tok.text);
      }
    });
    return out;
  }

  nlohmann::json doc = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    spdlog::warn("unparseable JSON payload from {}", request_url);
    return out;
  }
  walk_json(doc, [&](const std::string& s) { visit(s); });
  return out;
}

ExtractionResult extract_all(const RenderedPage& page, const ClassifyOptions& options) {
  ExtractionResult out = extract_html_links(page, options);
  for (const auto& xhr : page.xhr_responses) {
    if (!xhr_payload_type(xhr.request_url, xhr.content_type)) continue;
    out.merge(extract_xhr_links(xhr.request_url, xhr.content_type, xhr.body, page.url, options));
  }
  return out;
}

}  // namespace camscout
