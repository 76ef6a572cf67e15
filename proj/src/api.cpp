#include "camscout/api.hpp"

#include <algorithm>
#include <charconv>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "camscout/error.hpp"
#include "camscout/pipeline.hpp"

namespace camscout {

using nlohmann::json;

namespace {

ApiResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

ApiResponse error_response(int status, std::string_view kind, const std::string& message) {
  return json_response(status, json{{"error", kind}, {"message", message}});
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound: return 404;
    case ErrorKind::ConflictingLabel: return 409;
    case ErrorKind::LabelRejected: return 422;
    case ErrorKind::Io: return 500;
    default: return 400;
  }
}

std::optional<std::string> param(const QueryParams& q, const std::string& key) {
  auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    std::size_t next = path.find('/', pos);
    if (next == std::string_view::npos) next = path.size();
    if (next > pos) parts.emplace_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

std::string image_type(std::string_view bytes) {
  switch (sniff_image_format(bytes)) {
    case ImageFormat::Png: return "image/png";
    case ImageFormat::Jpeg: return "image/jpeg";
    case ImageFormat::Unknown: break;
  }
  return "application/octet-stream";
}

// Frame index from "2" or from a schedule offset such as "5m".
std::optional<std::size_t> frame_index(const std::string& which, const std::vector<Duration>& offsets,
                                       std::size_t count) {
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(which.data(), which.data() + which.size(), n);
  if (ec == std::errc{} && ptr == which.data() + which.size()) {
    if (n < count) return n;
    return std::nullopt;
  }
  try {
    Duration d = parse_duration(which);
    for (std::size_t i = 0; i < offsets.size() && i < count; ++i)
      if (offsets[i] == d) return i;
  } catch (const Error&) {
  }
  return std::nullopt;
}

}  // namespace

Api::Api(Store& store, Clock& clock) : store_(store), clock_(clock) {}

ApiResponse Api::handle(std::string_view method, std::string_view path, const QueryParams& query,
                        std::string_view body) {
  const auto parts = split_path(path);
  try {
    if (parts.size() < 2 || parts[0] != "api") return error_response(404, "NotFound", "no route");
    const std::string& resource = parts[1];
    if (method == "POST") {
      if (parts.size() == 2 && resource == "labels") return post_label(body);
      return error_response(405, "MethodNotAllowed", std::string(path));
    }
    if (method != "GET") return error_response(405, "MethodNotAllowed", std::string(path));
    if (resource == "cameras") {
      if (parts.size() == 2) return list_cameras(query);
      if (parts.size() == 3) return camera(parts[2]);
      if (parts.size() == 5 && parts[3] == "frames") return camera_frame(parts[2], parts[4]);
    } else if (resource == "candidates" && parts.size() == 2) {
      return candidates(query);
    } else if (resource == "framesets") {
      if (parts.size() == 3) return frameset(parts[2]);
      if (parts.size() == 5 && parts[3] == "frames") return frameset_frame(parts[2], parts[4]);
    } else if (resource == "labels" && parts.size() == 2) {
      return json_response(200, json(store_.labels()));
    } else if (resource == "eval" && parts.size() == 2) {
      return eval(query);
    }
    return error_response(404, "NotFound", "no route for " + std::string(path));
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const json::exception& e) {
    return error_response(400, "UnparseablePayload", e.what());
  }
}

ApiResponse Api::list_cameras(const QueryParams& query) const {
  CameraFilter filter;
  filter.domain = param(query, "domain");
  if (auto kind = param(query, "kind")) {
    try {
      filter.stream_kind = stream_kind_from_string(*kind);
    } catch (const Error&) {
      filter.kind = link_kind_from_string(*kind);
    }
  }
  return json_response(200, json(store_.list_cameras(filter)));
}

ApiResponse Api::camera(const std::string& id) const {
  auto cam = store_.get_camera(id);
  if (!cam) return error_response(404, "NotFound", "no camera " + id);
  return json_response(200, json(*cam));
}

ApiResponse Api::camera_frame(const std::string& id, const std::string& which) const {
  auto cam = store_.get_camera(id);
  if (!cam) return error_response(404, "NotFound", "no camera " + id);
  std::vector<Duration> offsets;
  if (auto m = store_.get_frameset_manifest(id)) {
    // frame_refs hold present frames only; map offsets through the manifest.
    if (auto i = frame_index(which, m->offsets, m->frames.size()); i && m->frames[*i]) {
      if (auto bytes = store_.get_frame_bytes(m->frames[*i]->checksum))
        return {200, image_type(*bytes), std::move(*bytes)};
    }
    return error_response(404, "NotFound", "no frame " + which + " for camera " + id);
  }
  auto i = frame_index(which, offsets, cam->frame_refs.size());
  if (!i) return error_response(404, "NotFound", "no frame " + which + " for camera " + id);
  auto bytes = store_.get_frame_bytes(cam->frame_refs[*i]);
  if (!bytes) return error_response(404, "NotFound", "frame bytes missing");
  return {200, image_type(*bytes), std::move(*bytes)};
}

ApiResponse Api::candidates(const QueryParams& query) const {
  FrameSetFilter filter;
  filter.unlabeled_only = param(query, "unlabeled").value_or("false") == "true";
  filter.domain = param(query, "domain");
  auto sets = store_.list_framesets(filter);
  std::stable_sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) { return a.t0 < b.t0; });
  json out = json::array();
  for (const auto& m : sets) out.push_back(json::parse(frameset(m.id).body));
  return json_response(200, out);
}

ApiResponse Api::frameset(const std::string& id) const {
  auto m = store_.get_frameset_manifest(id);
  if (!m) return error_response(404, "NotFound", "no frameset " + id);
  json j = *m;
  json urls = json::array();
  for (std::size_t i = 0; i < m->frames.size(); ++i)
    urls.push_back(m->frames[i] ? json("/api/framesets/" + id + "/frames/" + std::to_string(i)) : json(nullptr));
  j["frame_urls"] = urls;
  j["bytes_changed"] = m->bytes_ever_changed();
  json verdicts = json::array();
  for (const auto& c : store_.classifications())
    if (link_id(c.link.canonical_key) == id) verdicts.push_back(c);
  j["classifications"] = verdicts;
  return json_response(200, j);
}

ApiResponse Api::frameset_frame(const std::string& id, const std::string& which) const {
  auto m = store_.get_frameset_manifest(id);
  if (!m) return error_response(404, "NotFound", "no frameset " + id);
  auto i = frame_index(which, m->offsets, m->frames.size());
  if (!i || !m->frames[*i]) return error_response(404, "NotFound", "frame " + which + " is missing");
  auto bytes = store_.get_frame_bytes(m->frames[*i]->checksum);
  if (!bytes) return error_response(404, "NotFound", "frame bytes missing");
  return {200, image_type(*bytes), std::move(*bytes)};
}

ApiResponse Api::post_label(std::string_view body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return error_response(400, "UnparseablePayload", "body is not a JSON object");
  for (const char* key : {"frameset_id", "label", "labeler"})
    if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty())
      return error_response(400, "InvalidConfig", std::string("missing field ") + key);
  LabeledSample sample;
  sample.frameset_id = j["frameset_id"].get<std::string>();
  sample.label = label_from_string(j["label"].get<std::string>());
  sample.labeler = j["labeler"].get<std::string>();
  sample.labeled_at = clock_.now();
  std::lock_guard lock(write_mu_);
  if (auto m = store_.get_frameset_manifest(sample.frameset_id)) {
    std::size_t changed = 0;
    for (const auto& c : m->pixel_change_count) changed = std::max(changed, c.value_or(0));
    sample.pixel_change_count = changed;
  }
  store_.put_label(sample);
  return json_response(201, json(sample));
}

ApiResponse Api::eval(const QueryParams& query) const {
  EvalOptions options;
  if (auto m = param(query, "method")) options.method.method = method_from_string(*m);
  if (auto t = param(query, "threshold")) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
    if (ec != std::errc{} || ptr != t->data() + t->size())
      return error_response(400, "InvalidConfig", "bad threshold '" + *t + "'");
    if (options.method.method == Method::PercentDiff) options.method.percent_threshold = v;
    else options.method.luminance_threshold = v;
  }
  options.sweep = param(query, "sweep").value_or("true") != "false";
  auto truth = truth_from_labels(store_.resolved_labels());
  if (truth.empty()) return error_response(404, "NotFound", "no labeled framesets");
  return json_response(200, json(run_eval(store_, truth, options)));
}

ApiServer::ApiServer(Api& api, std::optional<std::filesystem::path> ui_dir)
    : api_(api), server_(std::make_unique<httplib::Server>()) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    QueryParams query(req.params.begin(), req.params.end());
    ApiResponse r = api_.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(std::move(r.body), r.content_type);
  };
  server_->Get(R"(/api/.*)", route);
  server_->Post(R"(/api/.*)", route);
  if (ui_dir && !server_->set_mount_point("/", ui_dir->string()))
    throw Error(ErrorKind::InvalidConfig, "ui directory " + ui_dir->string() + " does not exist");
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorKind::Io, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port))
    throw Error(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void ApiServer::serve() { server_->listen_after_bind(); }

void ApiServer::stop() {
  if (server_) server_->stop();
}

std::pair<std::string, int> parse_listen_address(std::string_view text) {
  std::string host = "127.0.0.1";
  int port = 8080;
  auto colon = text.rfind(':');
  std::string_view h = colon == std::string_view::npos ? text : text.substr(0, colon);
  if (!h.empty()) host = std::string(h);
  if (colon != std::string_view::npos) {
    std::string_view p = text.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), port);
    if (ec != std::errc{} || ptr != p.data() + p.size() || port < 0 || port > 65535)
      throw Error(ErrorKind::InvalidConfig, "bad port in '" + std::string(text) + "'");
  }
  return {host, port};
}

}  // namespace camscout
