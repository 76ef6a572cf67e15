#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "camscout/crawler.hpp"
#include "camscout/evaluator.hpp"
#include "camscout/identifier.hpp"
#include "camscout/linkmodel.hpp"
#include "camscout/sampler.hpp"

// JSON shapes of everything that is written to line-delimited record files
// or served over HTTP. Timestamps are RFC 3339 strings, durations are integer
// milliseconds.
namespace camscout {

struct FrameRef {
  std::string checksum;  // hex MD5, also the frame file name
  Timestamp captured_at{};
  bool decode_ok = false;
  int width = 0;
  int height = 0;
  std::size_t size = 0;

  friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

struct FrameSetManifest {
  std::string id;
  DataLink link;
  std::vector<Duration> offsets;
  Timestamp t0{};
  std::vector<std::optional<FrameRef>> frames;
  std::vector<std::optional<std::size_t>> pixel_change_count;  // per later frame

  bool bytes_ever_changed() const;
  friend bool operator==(const FrameSetManifest&, const FrameSetManifest&) = default;
};

FrameSetManifest make_manifest(const FrameSet& fs);

struct CameraRecord {
  std::string id;
  DataLink data_link;
  ClassificationResult classification;
  Timestamp first_seen{};
  Timestamp last_verified{};
  std::vector<std::string> frame_refs;

  friend bool operator==(const CameraRecord&, const CameraRecord&) = default;
};

void to_json(nlohmann::json& j, const DataLink& v);
void from_json(const nlohmann::json& j, DataLink& v);
void to_json(nlohmann::json& j, const FrameRef& v);
void from_json(const nlohmann::json& j, FrameRef& v);
void to_json(nlohmann::json& j, const FrameSetManifest& v);
void from_json(const nlohmann::json& j, FrameSetManifest& v);
void to_json(nlohmann::json& j, const ClassificationResult& v);
void from_json(const nlohmann::json& j, ClassificationResult& v);
void to_json(nlohmann::json& j, const CameraRecord& v);
void from_json(const nlohmann::json& j, CameraRecord& v);
void to_json(nlohmann::json& j, const LabeledSample& v);
void from_json(const nlohmann::json& j, LabeledSample& v);
void to_json(nlohmann::json& j, const PrPoint& v);
void from_json(const nlohmann::json& j, PrPoint& v);
void to_json(nlohmann::json& j, const EvalReport& v);
void from_json(const nlohmann::json& j, EvalReport& v);
void to_json(nlohmann::json& j, const CrawlError& v);
void from_json(const nlohmann::json& j, CrawlError& v);

// Crawl report as JSON lines: one {"record":"data_link",...} per link,
// then one {"record":"crawl_report",...} summary.
std::vector<nlohmann::json> crawl_report_lines(const CrawlReport& report);
// Inverse of crawl_report_lines for one report's worth of lines.
CrawlReport crawl_report_from_lines(const std::vector<nlohmann::json>& lines);

// CSV with header "threshold,precision,recall"; undefined rates are empty.
std::string pr_curve_csv(const std::vector<PrPoint>& curve);

}  // namespace camscout
