#include "camscout/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "camscout/error.hpp"

namespace camscout {

using nlohmann::json;

GrayImage SyntheticImage::pixels() const {
  GrayImage img(width, height);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> jitter(-noise, noise);
  for (auto& p : img.pixels) {
    int v = fill + (noise > 0 ? jitter(rng) : 0);
    p = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
  }
  return img;
}

std::string SyntheticImage::encode() const {
  GrayImage img = pixels();
  return jpeg ? encode_jpeg(img.width, img.height, 1, img.pixels) : encode_png(img);
}

std::vector<FrameSet> synthetic_framesets(std::size_t count, int width, int height, std::uint32_t seed) {
  const SampleSchedule schedule = SampleSchedule::standard();
  const Timestamp t0 = VirtualClock::default_epoch();
  std::vector<FrameSet> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    FrameSet fs;
    fs.link = *make_data_link(Url::parse("http://bench.test/img/" + std::to_string(i) + ".png"),
                              Provenance::HtmlEmbed, "http://bench.test/");
    fs.link.seed_domain = "bench.test";
    fs.schedule = schedule;
    fs.t0 = t0;
    SyntheticImage gen;
    gen.width = width;
    gen.height = height;
    gen.noise = 30;
    gen.fill = 60 + static_cast<int>(i % 120);
    for (std::size_t k = 0; k < schedule.offsets.size(); ++k) {
      gen.seed = seed + static_cast<std::uint32_t>(i * 31 + (i % 2 ? k : 0));
      fs.frames.emplace_back(make_frame(gen.encode(), t0 + schedule.offsets[k]));
    }
    out.push_back(std::move(fs));
  }
  return out;
}

namespace {

std::string key_of(const Url& url) {
  Url u = url;
  u.fragment.reset();
  if (u.has_authority && u.path.empty()) u.path = "/";
  return u.to_string();
}

std::string render_image(const json& spec, double elapsed_s, int count) {
  SyntheticImage gen;
  gen.width = spec.value("width", 64);
  gen.height = spec.value("height", 48);
  gen.noise = spec.value("noise", 0);
  gen.jpeg = spec.value("format", std::string("png")) == "jpeg";
  const double drift = spec.value("drift_per_h", 0.0) * elapsed_s / 3600.0;
  gen.fill = std::clamp(static_cast<int>(spec.value("fill", 128) + drift), 0, 255);
  std::uint32_t seed = spec.value("seed", 1u);
  const double vary = spec.value("vary_s", 0.0);
  if (vary > 0) seed += static_cast<std::uint32_t>(elapsed_s / vary) * 7919u;
  if (gen.width <= 0 || gen.height <= 0) throw Error(ErrorKind::InvalidConfig, "fixture image has no area");

  GrayImage img;
  gen.seed = seed;
  img = gen.pixels();
  if (auto c = spec.find("counter"); c != spec.end()) {
    const int x0 = c->value("x", 0), y0 = c->value("y", 0);
    const int w = c->value("w", 3), h = c->value("h", 3);
    const auto shade = static_cast<std::uint8_t>((count * 37) % 256);
    for (int y = y0; y < std::min(y0 + h, img.height); ++y)
      for (int x = x0; x < std::min(x0 + w, img.width); ++x) img.at(x, y) = shade;
  }
  return gen.jpeg ? encode_jpeg(img.width, img.height, 1, img.pixels) : encode_png(img);
}

}  // namespace

FixtureFetcher::FixtureFetcher(Clock& clock, json site) : clock_(clock), epoch_(clock.now()) {
  if (!site.is_object() || !site.contains("resources") || !site["resources"].is_object())
    throw Error(ErrorKind::InvalidConfig, "fixture needs a \"resources\" object");
  site_ = site;
  json normalized = json::object();
  for (auto& [url, spec] : site["resources"].items()) normalized[key_of(Url::parse(url))] = spec;
  site_["resources"] = std::move(normalized);
}

json FixtureFetcher::load_site(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open fixture " + path.string());
  json site = json::parse(in, nullptr, false);
  if (site.is_discarded()) throw Error(ErrorKind::UnparseablePayload, "fixture " + path.string() + " is not JSON");
  return site;
}

const json* FixtureFetcher::lookup(const Url& url, std::string& key) const {
  key = key_of(url);
  const json& resources = site_["resources"];
  auto it = resources.find(key);
  if (it == resources.end() && url.query) {
    // Cache-busting parameters: fall back to the resource without a query.
    Url bare = url;
    bare.query.reset();
    bare.fragment.reset();
    it = resources.find(bare.to_string());
  }
  return it == resources.end() ? nullptr : &*it;
}

json FixtureFetcher::effective_spec(const json& spec) const {
  auto timeline = spec.find("timeline");
  if (timeline == spec.end()) return spec;
  const double elapsed = std::chrono::duration<double>(clock_.now() - epoch_).count();
  json out = spec;
  out.erase("timeline");
  for (const auto& entry : *timeline) {
    if (entry.value("at_s", 0.0) > elapsed) break;
    json patch = entry;
    patch.erase("at_s");
    out.merge_patch(patch);
  }
  return out;
}

int FixtureFetcher::record(const std::string& key) {
  std::lock_guard lock(mu_);
  calls_.push_back({key, clock_.now()});
  return ++counts_[key];
}

FixtureFetcher::Response FixtureFetcher::render(const std::string& key, const json& raw, int count) const {
  const json spec = effective_spec(raw);
  const double elapsed = std::chrono::duration<double>(clock_.now() - epoch_).count();
  Response r;
  r.status = spec.value("status", 200);
  if (auto redirect = spec.find("redirect"); redirect != spec.end()) {
    r.status = spec.value("status", 302);
    r.location = redirect->get<std::string>();
    return r;
  }
  if (auto body = spec.find("body"); body != spec.end()) {
    r.body = body->get<std::string>();
    r.content_type = key.ends_with(".m3u8") || key.ends_with(".m3u") ? "application/vnd.apple.mpegurl"
                     : key.ends_with("robots.txt")                  ? "text/plain"
                                                                    : "text/html";
  } else if (auto doc = spec.find("json"); doc != spec.end()) {
    r.body = doc->dump();
    r.content_type = "application/json";
  } else if (auto img = spec.find("image"); img != spec.end()) {
    r.body = render_image(*img, elapsed, count);
    r.content_type = img->value("format", std::string("png")) == "jpeg" ? "image/jpeg" : "image/png";
  } else if (auto mj = spec.find("mjpeg"); mj != spec.end()) {
    const std::string boundary = mj->value("boundary", std::string("frame"));
    json img = mj->value("image", json::object());
    img["format"] = "jpeg";
    const int parts = mj->value("parts", 3);
    for (int i = 0; i < parts; ++i) {
      std::string jpeg = render_image(img, elapsed + i, count * 1000 + i);
      r.body += "--" + boundary + "\r\nContent-Type: image/jpeg\r\nContent-Length: " +
                std::to_string(jpeg.size()) + "\r\n\r\n" + jpeg + "\r\n";
    }
    r.content_type = "multipart/x-mixed-replace; boundary=" + boundary;
  }
  r.content_type = spec.value("content_type", r.content_type);
  return r;
}

RenderedPage FixtureFetcher::fetch(const Url& url, const FetchOptions& options) {
  std::string key;
  const json* spec = lookup(url, key);
  const int count = record(key);
  RenderedPage page;
  page.url = key;
  if (!spec) {
    page.status = 404;
    page.content_type = "text/plain";
    page.html = "not found";
    page.fetched_at = clock_.now();
    return page;
  }
  const json eff = effective_spec(*spec);
  const std::string error = eff.value("error", std::string());
  const Duration delay{eff.value("delay_ms", std::int64_t{0})};
  if (error == "timeout" || (delay > Duration{0} && delay >= options.timeout)) {
    clock_.sleep_for(options.timeout);
    throw Error(ErrorKind::FetchTimeout, key + " did not answer within " + format_duration(options.timeout));
  }
  if (error == "failed") throw Error(ErrorKind::FetchFailed, "connection to " + key + " refused");
  if (delay > Duration{0}) clock_.sleep_for(delay);

  Response r = render(key, *spec, count);
  page.status = r.status;
  page.content_type = r.content_type;
  page.html = std::move(r.body);
  page.location = r.location;
  page.fetched_at = clock_.now();
  if (auto xhr = eff.find("xhr"); xhr != eff.end()) {
    for (const auto& target : *xhr) {
      auto resolved = try_resolve(url, target.get<std::string>());
      if (!resolved) continue;
      std::string xkey;
      const json* xspec = lookup(*resolved, xkey);
      if (!xspec) continue;
      Response xr = render(xkey, *xspec, count);
      page.xhr_responses.push_back({xkey, xr.content_type, std::move(xr.body)});
    }
  }
  return page;
}

StreamCapture FixtureFetcher::open_stream(const Url& url, std::size_t max_bytes, Duration timeout) {
  RenderedPage page = fetch(url, FetchOptions{timeout, Duration{0}});
  StreamCapture capture;
  capture.status = page.status;
  capture.content_type = page.content_type;
  capture.bytes = std::move(page.html);
  if (capture.bytes.size() > max_bytes) {
    capture.bytes.resize(max_bytes);
    capture.truncated = true;
  }
  return capture;
}

std::vector<FixtureFetcher::Call> FixtureFetcher::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::vector<std::string> FixtureFetcher::planted_cameras() const {
  std::vector<std::string> out;
  if (auto it = site_.find("planted_cameras"); it != site_.end())
    for (const auto& u : *it) out.push_back(u.get<std::string>());
  return out;
}

int FixtureFetcher::request_count(const std::string& url) const {
  std::lock_guard lock(mu_);
  auto it = counts_.find(key_of(Url::parse(url)));
  return it == counts_.end() ? 0 : it->second;
}

}  // namespace camscout
