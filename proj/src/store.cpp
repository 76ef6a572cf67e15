#include "camscout/store.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "camscout/error.hpp"

namespace camscout {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kLinks = "links.jsonl";
constexpr const char* kCrawl = "crawl_reports.jsonl";
constexpr const char* kFramesets = "framesets.jsonl";
constexpr const char* kClassifications = "classifications.jsonl";
constexpr const char* kCameras = "cameras.jsonl";
constexpr const char* kLabels = "labels.jsonl";
constexpr const char* kEvals = "evals.jsonl";

template <typename F>
void for_each_line(const fs::path& path, F&& f) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      spdlog::warn("{}:{}: skipping unparseable line", path.string(), n);
      continue;
    }
    try {
      f(j);
    } catch (const std::exception& e) {
      spdlog::warn("{}:{}: skipping bad record: {}", path.string(), n, e.what());
    }
  }
}

bool is_hex_digest(const std::string& s) {
  return s.size() == 32 && s.find_first_not_of("0123456789abcdef") == std::string::npos;
}

}  // namespace

Store::Store(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "frames", ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + root_.string() + ": " + ec.message());
  replay();
}

fs::path Store::default_root() {
  if (const char* env = std::getenv("CAMSCOUT_DATA_DIR"); env && *env) return env;
  return "camscout-data";
}

void Store::replay() {
  for_each_line(root_ / kLinks, [&](const json& j) {
    DataLink link = j.get<DataLink>();
    if (link_index_.emplace(link.canonical_key, links_.size()).second) links_.push_back(std::move(link));
  });
  for_each_line(root_ / kFramesets, [&](const json& j) {
    FrameSetManifest m = j.get<FrameSetManifest>();
    framesets_[m.id] = std::move(m);
  });
  for_each_line(root_ / kClassifications, [&](const json& j) {
    ClassificationResult r = j.get<ClassificationResult>();
    classifications_[{link_id(r.link.canonical_key), std::string(to_string(r.method))}] = std::move(r);
  });
  for_each_line(root_ / kCameras, [&](const json& j) {
    if (j.value("deleted", false)) {
      cameras_.erase(j.at("id").get<std::string>());
      return;
    }
    CameraRecord c = j.get<CameraRecord>();
    cameras_[c.id] = std::move(c);
  });
  for_each_line(root_ / kLabels, [&](const json& j) { labels_.push_back(j.get<LabeledSample>()); });
  for_each_line(root_ / kEvals, [&](const json& j) { evals_.push_back(j.get<EvalReport>()); });
}

void Store::append(const char* file, const json& line) const {
  std::ofstream out(root_ / file, std::ios::app | std::ios::binary);
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to " + (root_ / file).string() + " failed");
}

std::string Store::put_frame_bytes(std::string_view bytes) {
  const std::string hex = md5_hex(bytes);
  const fs::path target = root_ / "frames" / hex;
  std::unique_lock lock(mu_);
  if (fs::exists(target)) return hex;
  const fs::path tmp = root_ / "frames" / (hex + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
  return hex;
}

std::optional<std::string> Store::get_frame_bytes(const std::string& checksum) const {
  if (!is_hex_digest(checksum)) return std::nullopt;
  std::ifstream in(root_ / "frames" / checksum, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t Store::put_crawl_report(const CrawlReport& report) {
  std::unique_lock lock(mu_);
  for (const auto& line : crawl_report_lines(report)) append(kCrawl, line);
  std::size_t added = 0;
  for (const auto& link : report.data_links) {
    if (!link_index_.emplace(link.canonical_key, links_.size()).second) continue;
    links_.push_back(link);
    append(kLinks, json(link));
    ++added;
  }
  return added;
}

std::vector<DataLink> Store::data_links() const {
  std::shared_lock lock(mu_);
  return links_;
}

FrameSetManifest Store::put_frameset(const FrameSet& set) {
  for (const auto& f : set.frames)
    if (f) put_frame_bytes(f->bytes);
  FrameSetManifest m = make_manifest(set);
  std::unique_lock lock(mu_);
  append(kFramesets, json(m));
  framesets_[m.id] = m;
  return m;
}

std::optional<FrameSetManifest> Store::get_frameset_manifest(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = framesets_.find(id);
  if (it == framesets_.end()) return std::nullopt;
  return it->second;
}

std::vector<FrameSetManifest> Store::list_framesets(const FrameSetFilter& filter) const {
  std::shared_lock lock(mu_);
  std::set<std::string> labeled;
  for (const auto& l : labels_) labeled.insert(l.frameset_id);
  std::vector<FrameSetManifest> out;
  for (const auto& [id, m] : framesets_) {
    if (filter.unlabeled_only && labeled.count(id)) continue;
    if (filter.domain && m.link.seed_domain != *filter.domain) continue;
    out.push_back(m);
  }
  return out;
}

FrameSet Store::load_frameset(const std::string& id) const {
  auto m = get_frameset_manifest(id);
  if (!m) throw Error(ErrorKind::NotFound, "no frameset " + id);
  FrameSet set;
  set.link = m->link;
  set.schedule.offsets = m->offsets;
  set.t0 = m->t0;
  for (const auto& ref : m->frames) {
    if (!ref) {
      set.frames.emplace_back();
      continue;
    }
    auto bytes = get_frame_bytes(ref->checksum);
    if (!bytes) throw Error(ErrorKind::NotFound, "frame " + ref->checksum + " of " + id + " is missing");
    set.frames.emplace_back(make_frame(std::move(*bytes), ref->captured_at));
  }
  return set;
}

void Store::put_classification(const ClassificationResult& result) {
  std::unique_lock lock(mu_);
  append(kClassifications, json(result));
  classifications_[{link_id(result.link.canonical_key), std::string(to_string(result.method))}] = result;
}

std::vector<ClassificationResult> Store::classifications(std::optional<Method> method) const {
  std::shared_lock lock(mu_);
  std::vector<ClassificationResult> out;
  for (const auto& [key, r] : classifications_)
    if (!method || r.method == *method) out.push_back(r);
  return out;
}

void Store::record_verdict(const ClassificationResult& result, const std::vector<std::string>& frame_refs,
                           Timestamp verified_at) {
  const std::string id = link_id(result.link.canonical_key);
  std::unique_lock lock(mu_);
  auto it = cameras_.find(id);
  if (!result.is_camera) {
    if (it == cameras_.end()) return;
    append(kCameras, json{{"id", id}, {"deleted", true}});
    cameras_.erase(it);
    return;
  }
  CameraRecord rec;
  rec.id = id;
  rec.data_link = result.link;
  rec.classification = result;
  rec.first_seen = it == cameras_.end() ? verified_at : it->second.first_seen;
  rec.last_verified = verified_at;
  rec.frame_refs = frame_refs;
  append(kCameras, json(rec));
  cameras_[id] = std::move(rec);
}

std::optional<CameraRecord> Store::get_camera(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = cameras_.find(id);
  if (it == cameras_.end()) return std::nullopt;
  return it->second;
}

std::vector<CameraRecord> Store::list_cameras(const CameraFilter& filter) const {
  std::shared_lock lock(mu_);
  std::vector<CameraRecord> out;
  for (const auto& [id, c] : cameras_) {
    if (filter.domain && c.data_link.seed_domain != *filter.domain) continue;
    if (filter.kind && c.data_link.kind != *filter.kind) continue;
    if (filter.stream_kind && c.data_link.stream_kind != filter.stream_kind) continue;
    out.push_back(c);
  }
  return out;
}

void Store::put_label(const LabeledSample& sample) {
  std::unique_lock lock(mu_);
  auto it = framesets_.find(sample.frameset_id);
  if (it == framesets_.end()) throw Error(ErrorKind::NotFound, "no frameset " + sample.frameset_id);
  if (sample.label == Label::NetworkCamera && !it->second.bytes_ever_changed())
    throw Error(ErrorKind::LabelRejected,
                "frames of " + sample.frameset_id + " never changed; it cannot be labeled NetworkCamera");
  for (const auto& l : labels_)
    if (l.frameset_id == sample.frameset_id && l.labeler == sample.labeler)
      throw Error(ErrorKind::ConflictingLabel,
                  sample.labeler + " already labeled " + sample.frameset_id + " as " + std::string(to_string(l.label)));
  append(kLabels, json(sample));
  labels_.push_back(sample);
}

std::vector<LabeledSample> Store::labels() const {
  std::shared_lock lock(mu_);
  return labels_;
}

std::map<std::string, Label> Store::resolved_labels() const {
  std::shared_lock lock(mu_);
  std::map<std::string, std::pair<int, int>> votes;  // camera, other
  for (const auto& l : labels_) {
    auto& v = votes[l.frameset_id];
    (l.label == Label::NetworkCamera ? v.first : v.second)++;
  }
  std::map<std::string, Label> out;
  for (const auto& [id, v] : votes) out[id] = v.first > v.second ? Label::NetworkCamera : Label::OtherWebAsset;
  return out;
}

void Store::put_eval(const EvalReport& report) {
  std::unique_lock lock(mu_);
  append(kEvals, json(report));
  evals_.push_back(report);
}

std::vector<EvalReport> Store::evals() const {
  std::shared_lock lock(mu_);
  return evals_;
}

}  // namespace camscout
