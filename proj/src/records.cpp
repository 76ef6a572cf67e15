#include "camscout/records.hpp"

#include <sstream>

#include "camscout/error.hpp"

namespace camscout {

using nlohmann::json;

namespace {

json opt_double(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_opt_double(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

Timestamp read_time(const json& j, const char* key) { return parse_timestamp(j.at(key).get<std::string>()); }

json offsets_json(const std::vector<Duration>& offsets) {
  json arr = json::array();
  for (auto d : offsets) arr.push_back(d.count());
  return arr;
}

std::vector<Duration> read_offsets(const json& j) {
  std::vector<Duration> out;
  for (const auto& v : j) out.emplace_back(v.get<std::int64_t>());
  return out;
}

}  // namespace

void to_json(json& j, const DataLink& v) {
  j = json{{"raw_url", v.raw_url},
           {"canonical_key", v.canonical_key},
           {"kind", to_string(v.kind)},
           {"stream_kind", v.stream_kind ? json(to_string(*v.stream_kind)) : json(nullptr)},
           {"provenance", to_string(v.provenance)},
           {"source_page", v.source_page},
           {"seed_domain", v.seed_domain},
           {"discovered_at", format_timestamp(v.discovered_at)},
           {"depth", v.depth}};
}

void from_json(const json& j, DataLink& v) {
  v.raw_url = j.at("raw_url").get<std::string>();
  v.canonical_key = j.at("canonical_key").get<std::string>();
  v.kind = link_kind_from_string(j.at("kind").get<std::string>());
  const json& sk = j.at("stream_kind");
  v.stream_kind = sk.is_null() ? std::nullopt : std::optional(stream_kind_from_string(sk.get<std::string>()));
  v.provenance = provenance_from_string(j.at("provenance").get<std::string>());
  v.source_page = j.at("source_page").get<std::string>();
  v.seed_domain = j.at("seed_domain").get<std::string>();
  v.discovered_at = read_time(j, "discovered_at");
  v.depth = j.at("depth").get<int>();
}

void to_json(json& j, const FrameRef& v) {
  j = json{{"checksum", v.checksum},         {"captured_at", format_timestamp(v.captured_at)},
           {"decode_ok", v.decode_ok},       {"width", v.width},
           {"height", v.height},             {"size", v.size}};
}

void from_json(const json& j, FrameRef& v) {
  v.checksum = j.at("checksum").get<std::string>();
  v.captured_at = read_time(j, "captured_at");
  v.decode_ok = j.at("decode_ok").get<bool>();
  v.width = j.at("width").get<int>();
  v.height = j.at("height").get<int>();
  v.size = j.at("size").get<std::size_t>();
}

bool FrameSetManifest::bytes_ever_changed() const {
  const FrameRef* first = nullptr;
  for (const auto& f : frames) {
    if (!f) continue;
    if (!first) first = &*f;
    else if (f->checksum != first->checksum) return true;
  }
  return false;
}

FrameSetManifest make_manifest(const FrameSet& fs) {
  FrameSetManifest m;
  m.id = fs.id();
  m.link = fs.link;
  m.offsets = fs.schedule.offsets;
  m.t0 = fs.t0;
  for (const auto& f : fs.frames) {
    if (!f) {
      m.frames.emplace_back();
      continue;
    }
    FrameRef ref;
    ref.checksum = to_hex(f->checksum);
    ref.captured_at = f->captured_at;
    ref.decode_ok = f->decode_ok();
    if (f->pixels) {
      ref.width = f->pixels->width;
      ref.height = f->pixels->height;
    }
    ref.size = f->bytes.size();
    m.frames.emplace_back(std::move(ref));
  }
  m.pixel_change_count = pixel_change_counts(fs);
  return m;
}

void to_json(json& j, const FrameSetManifest& v) {
  json frames = json::array();
  for (const auto& f : v.frames) frames.push_back(f ? json(*f) : json(nullptr));
  json counts = json::array();
  for (const auto& c : v.pixel_change_count) counts.push_back(c ? json(*c) : json(nullptr));
  j = json{{"id", v.id},
           {"link", v.link},
           {"offsets_ms", offsets_json(v.offsets)},
           {"t0", format_timestamp(v.t0)},
           {"frames", frames},
           {"pixel_change_count", counts}};
}

void from_json(const json& j, FrameSetManifest& v) {
  v.id = j.at("id").get<std::string>();
  v.link = j.at("link").get<DataLink>();
  v.offsets = read_offsets(j.at("offsets_ms"));
  v.t0 = read_time(j, "t0");
  v.frames.clear();
  for (const auto& f : j.at("frames")) {
    if (f.is_null()) v.frames.emplace_back();
    else v.frames.emplace_back(f.get<FrameRef>());
  }
  v.pixel_change_count.clear();
  for (const auto& c : j.at("pixel_change_count")) {
    if (c.is_null()) v.pixel_change_count.emplace_back();
    else v.pixel_change_count.emplace_back(c.get<std::size_t>());
  }
}

void to_json(json& j, const ClassificationResult& v) {
  j = json{{"link", v.link},
           {"method", to_string(v.method)},
           {"score", v.score},
           {"threshold", v.threshold},
           {"is_camera", v.is_camera},
           {"verdict", to_string(v.verdict)},
           {"frames_used_ms", offsets_json(v.frames_used)},
           {"note", v.note}};
}

void from_json(const json& j, ClassificationResult& v) {
  v.link = j.at("link").get<DataLink>();
  v.method = method_from_string(j.at("method").get<std::string>());
  v.score = j.at("score").get<double>();
  v.threshold = j.at("threshold").get<double>();
  v.is_camera = j.at("is_camera").get<bool>();
  v.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  v.frames_used = read_offsets(j.at("frames_used_ms"));
  v.note = j.value("note", "");
}

void to_json(json& j, const CameraRecord& v) {
  j = json{{"id", v.id},
           {"data_link", v.data_link},
           {"classification", v.classification},
           {"first_seen", format_timestamp(v.first_seen)},
           {"last_verified", format_timestamp(v.last_verified)},
           {"frame_refs", v.frame_refs}};
}

void from_json(const json& j, CameraRecord& v) {
  v.id = j.at("id").get<std::string>();
  v.data_link = j.at("data_link").get<DataLink>();
  v.classification = j.at("classification").get<ClassificationResult>();
  v.first_seen = read_time(j, "first_seen");
  v.last_verified = read_time(j, "last_verified");
  v.frame_refs = j.at("frame_refs").get<std::vector<std::string>>();
}

void to_json(json& j, const LabeledSample& v) {
  j = json{{"frameset_id", v.frameset_id},
           {"label", to_string(v.label)},
           {"labeler", v.labeler},
           {"labeled_at", format_timestamp(v.labeled_at)},
           {"pixel_change_count", v.pixel_change_count}};
}

void from_json(const json& j, LabeledSample& v) {
  v.frameset_id = j.at("frameset_id").get<std::string>();
  v.label = label_from_string(j.at("label").get<std::string>());
  v.labeler = j.at("labeler").get<std::string>();
  v.labeled_at = read_time(j, "labeled_at");
  v.pixel_change_count = j.value("pixel_change_count", std::size_t{0});
}

void to_json(json& j, const PrPoint& v) {
  j = json{{"threshold", v.threshold}, {"precision", opt_double(v.precision)}, {"recall", opt_double(v.recall)}};
}

void from_json(const json& j, PrPoint& v) {
  v.threshold = j.at("threshold").get<double>();
  v.precision = read_opt_double(j, "precision");
  v.recall = read_opt_double(j, "recall");
}

void to_json(json& j, const EvalReport& v) {
  j = json{{"method", v.method},
           {"tp", v.tp},
           {"fp", v.fp},
           {"fn", v.fn},
           {"tn", v.tn},
           {"precision", opt_double(v.precision)},
           {"recall", opt_double(v.recall)},
           {"accuracy", v.accuracy},
           {"pr_curve", v.pr_curve},
           {"selected_threshold", opt_double(v.selected_threshold)}};
}

void from_json(const json& j, EvalReport& v) {
  v.method = j.value("method", "");
  v.tp = j.at("tp").get<std::size_t>();
  v.fp = j.at("fp").get<std::size_t>();
  v.fn = j.at("fn").get<std::size_t>();
  v.tn = j.at("tn").get<std::size_t>();
  v.precision = read_opt_double(j, "precision");
  v.recall = read_opt_double(j, "recall");
  v.accuracy = j.at("accuracy").get<double>();
  v.pr_curve = j.value("pr_curve", std::vector<PrPoint>{});
  v.selected_threshold = read_opt_double(j, "selected_threshold");
}

void to_json(json& j, const CrawlError& v) { j = json{{"url", v.url}, {"error", v.error}}; }

void from_json(const json& j, CrawlError& v) {
  v.url = j.at("url").get<std::string>();
  v.error = j.at("error").get<std::string>();
}

std::vector<json> crawl_report_lines(const CrawlReport& report) {
  std::vector<json> lines;
  for (const auto& link : report.data_links) {
    json j = link;
    j["record"] = "data_link";
    lines.push_back(std::move(j));
  }
  json depth = json::object();
  for (const auto& [d, c] : report.per_depth_counts)
    depth[std::to_string(d)] = json{{"pages", c.pages}, {"data_links", c.data_links}};
  lines.push_back(json{{"record", "crawl_report"},
                       {"seed_url", report.seed_url},
                       {"seed_domain", report.seed_domain},
                       {"pages_crawled", report.pages_crawled},
                       {"unique_pages", report.unique_pages},
                       {"data_link_count", report.data_links.size()},
                       {"per_depth_counts", depth},
                       {"errors", report.errors},
                       {"visited_pages", report.visited_pages},
                       {"seed_unreachable", report.seed_unreachable}});
  return lines;
}

CrawlReport crawl_report_from_lines(const std::vector<json>& lines) {
  CrawlReport r;
  bool summary = false;
  for (const auto& j : lines) {
    const std::string kind = j.value("record", "");
    if (kind == "data_link") {
      r.data_links.push_back(j.get<DataLink>());
    } else if (kind == "crawl_report") {
      summary = true;
      r.seed_url = j.at("seed_url").get<std::string>();
      r.seed_domain = j.at("seed_domain").get<std::string>();
      r.pages_crawled = j.at("pages_crawled").get<int>();
      r.unique_pages = j.at("unique_pages").get<int>();
      for (const auto& [d, c] : j.at("per_depth_counts").items())
        r.per_depth_counts[std::stoi(d)] = DepthCount{c.at("pages").get<int>(), c.at("data_links").get<int>()};
      r.errors = j.at("errors").get<std::vector<CrawlError>>();
      r.visited_pages = j.at("visited_pages").get<std::vector<std::string>>();
      r.seed_unreachable = j.at("seed_unreachable").get<bool>();
    }
  }
  if (!summary) throw Error(ErrorKind::UnparseablePayload, "crawl report lines carry no summary record");
  return r;
}

std::string pr_curve_csv(const std::vector<PrPoint>& curve) {
  std::ostringstream out;
  out.precision(10);
  out << "threshold,precision,recall\n";
  for (const auto& p : curve) {
    out << p.threshold << ',';
    if (p.precision) out << *p.precision;
    out << ',';
    if (p.recall) out << *p.recall;
    out << '\n';
  }
  return out.str();
}

}  // namespace camscout
