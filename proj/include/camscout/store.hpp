#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "camscout/records.hpp"

namespace camscout {

struct CameraFilter {
  std::optional<std::string> domain;  // seed domain
  std::optional<LinkKind> kind;
  std::optional<StreamKind> stream_kind;
};

struct FrameSetFilter {
  bool unlabeled_only = false;
  std::optional<std::string> domain;
};

// Everything the pipeline persists, under one directory:
//
//   frames/<md5>            frame payloads, content addressed
//   links.jsonl             DataLinks, first discovery of a canonical key kept
//   crawl_reports.jsonl     crawl report lines, appended per crawl
//   framesets.jsonl         FrameSetManifest, latest per id wins
//   classifications.jsonl   ClassificationResult, latest per (link id, method)
//   cameras.jsonl           CameraRecord upserts and {"id":..,"deleted":true}
//   labels.jsonl            LabeledSample, append only
//   evals.jsonl             EvalReport
//
// Files are line-delimited JSON replayed on open; a torn final line is
// ignored. One process writes at a time; readers share a lock.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  // CAMSCOUT_DATA_DIR, else ./camscout-data
  static std::filesystem::path default_root();
  const std::filesystem::path& root() const { return root_; }

  // Returns the hex MD5 of the bytes.
  std::string put_frame_bytes(std::string_view bytes);
  std::optional<std::string> get_frame_bytes(const std::string& checksum) const;

  // Appends the report lines and records the report's links. Returns how
  // many links were new.
  std::size_t put_crawl_report(const CrawlReport& report);
  std::vector<DataLink> data_links() const;

  // Stores the frame bytes and the manifest.
  FrameSetManifest put_frameset(const FrameSet& fs);
  std::optional<FrameSetManifest> get_frameset_manifest(const std::string& id) const;
  std::vector<FrameSetManifest> list_framesets(const FrameSetFilter& filter = {}) const;
  // Rebuilds the FrameSet from stored bytes, decoding each frame again.
  // Throws Error(NotFound).
  FrameSet load_frameset(const std::string& id) const;

  void put_classification(const ClassificationResult& result);
  std::vector<ClassificationResult> classifications(std::optional<Method> method = std::nullopt) const;

  // Upserts on is_camera, removes the camera otherwise.
  void record_verdict(const ClassificationResult& result, const std::vector<std::string>& frame_refs,
                      Timestamp verified_at);
  std::optional<CameraRecord> get_camera(const std::string& id) const;
  std::vector<CameraRecord> list_cameras(const CameraFilter& filter = {}) const;

  // Throws Error(NotFound) for an unknown frameset, Error(LabelRejected) when
  // the labeling protocol forbids the label, Error(ConflictingLabel) when
  // the labeler already labeled this frameset.
  void put_label(const LabeledSample& sample);
  std::vector<LabeledSample> labels() const;
  // One label per frameset: majority vote over labelers, ties resolved to
  // OtherWebAsset.
  std::map<std::string, Label> resolved_labels() const;

  void put_eval(const EvalReport& report);
  std::vector<EvalReport> evals() const;

 private:
  void replay();
  void append(const char* file, const nlohmann::json& line) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mu_;
  std::vector<DataLink> links_;
  std::map<std::string, std::size_t> link_index_;
  std::map<std::string, FrameSetManifest> framesets_;
  std::map<std::pair<std::string, std::string>, ClassificationResult> classifications_;
  std::map<std::string, CameraRecord> cameras_;
  std::vector<LabeledSample> labels_;
  std::vector<EvalReport> evals_;
};

}  // namespace camscout
