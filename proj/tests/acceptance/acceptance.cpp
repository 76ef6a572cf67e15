// One PASS/FAIL line per primary acceptance criterion. Exit status is the
// number of failures.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <spdlog/spdlog.h>

#include "camscout/crawler.hpp"
#include "camscout/error.hpp"
#include "camscout/evaluator.hpp"
#include "camscout/fixture.hpp"
#include "camscout/identifier.hpp"
#include "camscout/kernels.hpp"

using namespace camscout;
using nlohmann::json;
using Clk = std::chrono::steady_clock;

namespace {

const char* const kFixtures[] = {"plain_list", "img_embedded", "xhr_map", "query_string", "off_domain"};

std::string fixture_path(const std::string& name) { return std::string(CAMSCOUT_FIXTURE_DIR) + "/" + name + ".json"; }

// Each check returns an empty string on success or the reason it failed.
struct Check {
  const char* name;
  std::function<std::string()> run;
};

std::string fail_if(bool bad, const std::string& why) { return bad ? why : std::string(); }

double seconds_since(Clk::time_point t) { return std::chrono::duration<double>(Clk::now() - t).count(); }

// ---- helpers ---------------------------------------------------------------

GrayImage random_image(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> px(0, 255);
  GrayImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(px(rng));
  return img;
}

DataLink link_for(const std::string& url) {
  auto link = make_data_link(Url::parse(url), Provenance::HtmlEmbed, "http://synthetic.test/");
  link->seed_domain = "synthetic.test";
  return *link;
}

FrameSet frameset_from(const std::vector<GrayImage>& images, const std::string& url) {
  FrameSet fs;
  fs.link = link_for(url);
  fs.schedule = SampleSchedule::standard();
  fs.t0 = VirtualClock::default_epoch();
  for (std::size_t i = 0; i < images.size(); ++i)
    fs.frames.emplace_back(make_frame(encode_png(images[i]), fs.t0 + fs.schedule.offsets[i]));
  return fs;
}

std::string run_command(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  status = ::pclose(pipe);
  return out;
}

// ---- criteria --------------------------------------------------------------

std::string oracle_equivalence() {
  const auto start = Clk::now();
  std::mt19937 rng(20191014);
  std::uniform_int_distribution<int> dim(1, 64), coin(0, 3);
  for (int i = 0; i < 1000; ++i) {
    const int w = dim(rng), h = dim(rng);
    GrayImage a = random_image(rng, w, h);
    GrayImage b = coin(rng) == 0 ? a : random_image(rng, w, h);
    if (coin(rng) == 0) b.pixels[rng() % b.size()] ^= 0x10;
    // Brute force per pixel, mirroring the two algorithms step by step.
    long changed = 0;
    long long sum_a = 0, sum_b = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        changed += a.at(x, y) != b.at(x, y);
        sum_a += a.at(x, y);
        sum_b += b.at(x, y);
      }
    const double pixels = static_cast<double>(w) * h;
    const double want_pct = static_cast<double>(changed) / pixels;
    const double want_lum = std::abs(static_cast<double>(sum_a) / pixels - static_cast<double>(sum_b) / pixels);
    if (percent_diff(a, b) != want_pct) return "percent_diff differs on pair " + std::to_string(i);
    if (luminance_diff(a, b) != want_lum) return "luminance_diff differs on pair " + std::to_string(i);
  }
  const double took = seconds_since(start);
  return fail_if(took >= 10.0, "took " + std::to_string(took) + " s");
}

std::string checksum_recall_and_ordering() {
  std::mt19937 rng(500);
  // Part 1: truth is "bytes changed after t0".
  std::vector<bool> predictions, truth;
  for (int i = 0; i < 500; ++i) {
    GrayImage base = random_image(rng, 24, 18);
    std::vector<GrayImage> imgs(4, base);
    const bool changes = rng() % 2;
    if (changes) imgs[1 + rng() % 3].pixels[rng() % base.size()] ^= 1;
    FrameSet fs = frameset_from(imgs, "http://synthetic.test/r" + std::to_string(i) + ".png");
    bool bytes_changed = false;
    for (const auto& f : fs.frames) bytes_changed |= f->bytes != fs.frames[0]->bytes;
    truth.push_back(bytes_changed);
    predictions.push_back(checksum_changed(fs));
  }
  EvalReport recall = compute_metrics(predictions, truth);
  if (!recall.recall || *recall.recall != 1.0) return "checksum recall below 1.0";

  // Part 2: cameras plus changing non-camera assets.
  std::vector<bool> labels, by_checksum, by_luminance;
  MethodConfig lum;
  auto add = [&](const FrameSet& fs, bool camera) {
    labels.push_back(camera);
    by_checksum.push_back(checksum_changed(fs));
    by_luminance.push_back(classify(fs, lum).is_camera);
  };
  for (int i = 0; i < 100; ++i) {
    // Outdoor camera: noisy scene whose brightness follows the day.
    std::vector<GrayImage> imgs;
    for (int k = 0; k < 4; ++k) {
      SyntheticImage s;
      s.width = 32;
      s.height = 24;
      s.noise = 12;
      s.seed = static_cast<std::uint32_t>(i * 10 + k);
      s.fill = k == 3 ? 60 : 140;  // night at +12h
      imgs.push_back(s.pixels());
    }
    add(frameset_from(imgs, "http://synthetic.test/cam" + std::to_string(i) + ".jpg"), true);
  }
  for (int i = 0; i < 60; ++i) {
    // Hit counter: a small patch repainted on every request.
    SyntheticImage s;
    s.width = 32;
    s.height = 24;
    s.seed = static_cast<std::uint32_t>(1000 + i);
    s.noise = 30;
    std::vector<GrayImage> imgs(4, s.pixels());
    for (int k = 1; k < 4; ++k)
      for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) imgs[k].at(x, y) = static_cast<std::uint8_t>(37 * (i + k));
    add(frameset_from(imgs, "http://synthetic.test/counter" + std::to_string(i) + ".png"), false);
  }
  for (int i = 0; i < 60; ++i) {
    // CAPTCHA-like swap: fresh noise of the same mean every time.
    std::vector<GrayImage> imgs;
    for (int k = 0; k < 4; ++k) {
      SyntheticImage s;
      s.width = 32;
      s.height = 24;
      s.noise = 40;
      s.seed = static_cast<std::uint32_t>(5000 + 4 * i + k);
      imgs.push_back(s.pixels());
    }
    add(frameset_from(imgs, "http://synthetic.test/captcha" + std::to_string(i) + ".png"), false);
  }
  for (int i = 0; i < 80; ++i) {
    SyntheticImage s;
    s.seed = static_cast<std::uint32_t>(9000 + i);
    s.noise = 50;
    add(frameset_from(std::vector<GrayImage>(4, s.pixels()), "http://synthetic.test/logo" + std::to_string(i) + ".png"),
        false);
  }
  EvalReport cs = compute_metrics(by_checksum, labels), lu = compute_metrics(by_luminance, labels);
  if (!cs.precision || !lu.precision) return "a precision is undefined";
  std::ostringstream detail;
  detail << "checksum precision " << *cs.precision << " vs luminance " << *lu.precision;
  if (!(*cs.precision < *lu.precision)) return detail.str();
  if (*cs.recall != 1.0) return "checksum recall on the mixed corpus is " + std::to_string(*cs.recall);
  return {};
}

std::string default_thresholds() {
  MethodConfig cfg;
  if (cfg.percent_threshold != 0.11) return "percent default is " + std::to_string(cfg.percent_threshold);
  if (cfg.luminance_threshold != 1.3) return "luminance default is " + std::to_string(cfg.luminance_threshold);
  // 100x100 so integer sums land on exact means.
  auto with_sum = [](int extra) {
    GrayImage img(100, 100, 100);
    for (int i = 0; i < extra; ++i) img.pixels[static_cast<std::size_t>(i) % img.size()]++;
    return img;
  };
  const GrayImage base = with_sum(0);
  auto lum_verdict = [&](int extra) {
    return classify(frameset_from({base, base, base, with_sum(extra)}, "http://synthetic.test/l.png"), cfg);
  };
  auto r129 = lum_verdict(12900), r131 = lum_verdict(13100);
  if (std::abs(r129.score - 1.29) > 1e-9 || r129.is_camera) return "1.29 classified as camera";
  if (std::abs(r131.score - 1.31) > 1e-9 || !r131.is_camera) return "1.31 not classified as camera";

  MethodConfig pct;
  pct.method = Method::PercentDiff;
  auto changed = [&](int n) {
    GrayImage img = base;
    for (int i = 0; i < n; ++i) img.pixels[i] ^= 1;
    return img;
  };
  auto p_below = classify(frameset_from({base, changed(1090), changed(1090), changed(1090)}, "http://synthetic.test/p.png"), pct);
  auto p_above = classify(frameset_from({base, changed(1110), changed(1110), changed(1110)}, "http://synthetic.test/p.png"), pct);
  if (p_below.is_camera) return "percent 0.109 classified as camera";
  if (!p_above.is_camera) return "percent 0.111 not classified as camera";
  return {};
}

std::vector<std::string> strings(const json& j) {
  std::vector<std::string> out;
  for (const auto& v : j) out.push_back(v.get<std::string>());
  return out;
}

std::string crawler_suite() {
  const auto start = Clk::now();
  for (const char* name : kFixtures) {
    const json site = FixtureFetcher::load_site(fixture_path(name));
    const json& expect = site["expect"];
    VirtualClock clock;
    FixtureFetcher fetcher(clock, site);
    CrawlReport report = crawl(site["seed"], CrawlConfig{}, fetcher, clock);
    const std::string tag = std::string(name) + ": ";

    if (report.visited_pages != strings(expect["pages"])) return tag + "page set or BFS order differs";
    std::set<std::string> links;
    for (const auto& d : report.data_links) links.insert(d.canonical_key);
    auto want = strings(expect["data_links"]);
    if (links != std::set<std::string>(want.begin(), want.end())) return tag + "data-link set differs";
    for (const auto& d : report.data_links)
      if (d.depth > 15) return tag + "link beyond depth 15";
    std::set<std::string> blocked;
    for (const auto& e : report.errors)
      if (e.error == "disallowed by robots.txt") blocked.insert(e.url);
    auto want_blocked = strings(expect["robots_blocked"]);
    if (blocked != std::set<std::string>(want_blocked.begin(), want_blocked.end())) return tag + "robots handling differs";

    std::map<std::string, Timestamp> last;
    for (const auto& call : fetcher.calls()) {
      const Url url = Url::parse(call.url);
      if (!same_domain(url, report.seed_domain)) return tag + "fetched off-domain " + call.url;
      for (const auto& b : want_blocked)
        if (call.url == b) return tag + "fetched disallowed " + b;
      const std::string domain = default_suffix_table().registrable_domain(url.host);
      if (auto it = last.find(domain); it != last.end() && call.at - it->second < Duration{3'000})
        return tag + "requests closer than 3 s";
      last[domain] = call.at;
    }
  }
  // The depth cutoff: the plain list hides one camera at depth 15 and one at 16.
  {
    const json site = FixtureFetcher::load_site(fixture_path("plain_list"));
    VirtualClock clock;
    FixtureFetcher fetcher(clock, site);
    CrawlReport report = crawl(site["seed"], CrawlConfig{}, fetcher, clock);
    bool deep = false, too_deep = false;
    for (const auto& d : report.data_links) {
      deep |= d.canonical_key == "http://list.test/cam/deep.jpg" && d.depth == 15;
      too_deep |= d.canonical_key == "http://list.test/cam/too-deep.jpg";
    }
    if (!deep || too_deep || fetcher.request_count("http://list.test/chain/16") != 0) return "depth cutoff wrong";
  }
  const double took = seconds_since(start);
  return fail_if(took >= 30.0, "took " + std::to_string(took) + " s");
}

std::string dedup() {
  const json site = FixtureFetcher::load_site(fixture_path("query_string"));
  // Count the distinct timestamped URLs in the fixture pages themselves.
  std::set<std::string> raw;
  for (const auto& [url, spec] : site["resources"].items()) {
    const std::string body = spec.value("body", "");
    for (std::size_t p = body.find("src=\""); p != std::string::npos; p = body.find("src=\"", p + 1))
      raw.insert(body.substr(p + 5, body.find('"', p + 5) - p - 5));
  }
  if (raw.size() != 10) return "fixture has " + std::to_string(raw.size()) + " distinct URLs, expected 10";
  VirtualClock clock;
  FixtureFetcher fetcher(clock, site);
  CrawlReport report = crawl(site["seed"], CrawlConfig{}, fetcher, clock);
  if (report.data_links.size() != 2) return std::to_string(report.data_links.size()) + " data links";
  std::set<std::string> keys;
  for (const auto& d : report.data_links) keys.insert(d.canonical_key);
  return fail_if(keys != std::set<std::string>{"http://qs.test/cams/a/snapshot.jpg", "http://qs.test/cams/b/image.jpg"},
                 "wrong canonical keys");
}

std::string stream_liveness() {
  const json site = FixtureFetcher::load_site(fixture_path("xhr_map"));
  VirtualClock clock;
  FixtureFetcher fetcher(clock, site);
  auto verdict = [&](const char* url) {
    DataLink link = *make_data_link(Url::parse(url), Provenance::XhrPayload, "http://map.test/");
    return classify_stream(link, probe_stream(link, fetcher), nullptr, MethodConfig{});
  };
  if (!verdict("http://map.test/live/cam.m3u8").is_camera) return "live HLS rejected";
  if (verdict("http://map.test/vod/clip.m3u8").is_camera) return "VOD accepted";
  if (!verdict("http://map.test/mjpg/video.mjpg").is_camera) return "MJPG rejected";
  return {};
}

std::string evaluator() {
  std::mt19937 rng(1000);
  std::uniform_int_distribution<int> len(1, 200);
  std::bernoulli_distribution bit(0.5);
  for (int i = 0; i < 1000; ++i) {
    const int n = len(rng);
    std::vector<bool> pred(n), real(n);
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (int k = 0; k < n; ++k) {
      pred[k] = bit(rng);
      real[k] = bit(rng);
      (pred[k] ? (real[k] ? tp : fp) : (real[k] ? fn : tn))++;
    }
    EvalReport r = compute_metrics(pred, real);
    if (r.tp != tp || r.fp != fp || r.fn != fn || r.tn != tn) return "confusion counts differ on vector " + std::to_string(i);
    if (tp + fp && *r.precision != static_cast<double>(tp) / static_cast<double>(tp + fp)) return "precision differs";
    if (tp + fn && *r.recall != static_cast<double>(tp) / static_cast<double>(tp + fn)) return "recall differs";
    if (r.accuracy != static_cast<double>(tp + tn) / static_cast<double>(n)) return "accuracy differs";
  }

  // Synthetic scores: cameras evenly spread over [1, 3], other assets over
  // [0, 2]. Overlap makes the trade-off real.
  std::vector<double> scores;
  std::vector<bool> labels;
  for (int i = 0; i < 100; ++i) {
    scores.push_back(1.0 + 2.0 * i / 99.0);
    labels.push_back(true);
    scores.push_back(2.0 * i / 99.0);
    labels.push_back(false);
  }
  auto curve = threshold_sweep(scores, labels, default_grid(scores));
  for (std::size_t k = 1; k < curve.size(); ++k)
    if (curve[k].recall > curve[k - 1].recall) return "recall rose with the threshold";

  // Known max-min point by exhaustive search.
  const PrPoint* known = nullptr;
  for (const auto& p : curve) {
    if (!p.precision || !p.recall) continue;
    if (!known || std::min(*p.precision, *p.recall) > std::min(*known->precision, *known->recall)) known = &p;
  }
  const double t = select_threshold(curve);
  if (t != known->threshold) return "selected " + std::to_string(t) + ", max-min point is " + std::to_string(known->threshold);
  const double gap = std::abs(*known->precision - *known->recall);
  for (const auto& p : curve)
    if (p.precision && p.recall && std::abs(*p.precision - *p.recall) < gap) return "a grid point has a smaller gap";
  return {};
}

std::string benchmark() {
  auto sets = synthetic_framesets(250);  // 1,000 images
  auto timings = benchmark_methods(sets, {Method::Checksum, Method::LuminanceDiff}, 20);
  std::ostringstream line;
  line << "checksum " << timings[0].mean_s * 1e3 << " ms, luminance " << timings[1].mean_s * 1e3 << " ms (sd "
       << timings[1].stddev_s * 1e3 << " ms), ratio " << timings[1].mean_s / timings[0].mean_s;
  std::cout << "  bench: " << line.str() << "\n";
  return fail_if(!(timings[0].mean_s < timings[1].mean_s), line.str());
}

std::string end_to_end() {
  namespace fs = std::filesystem;
  const fs::path data = fs::temp_directory_path() / ("camscout-e2e-" + std::to_string(::getpid()));
  fs::remove_all(data);
  std::string base = std::string("\"") + CAMSCOUT_CLI + "\" --log-level warn --data-dir \"" + data.string() + "\"";
  std::string truth;
  std::set<std::string> planted;
  for (const char* name : kFixtures) {
    base += " --fixture \"" + fixture_path(name) + "\"";
    truth += " --truth \"" + fixture_path(name) + "\"";
    const json site = FixtureFetcher::load_site(fixture_path(name));
    for (const auto& u : site["planted_cameras"]) planted.insert(u.get<std::string>());
  }
  int status = 0;
  for (const char* name : kFixtures) {
    const std::string seed = FixtureFetcher::load_site(fixture_path(name))["seed"];
    run_command(base + " crawl " + seed + " --virtual-clock", status);
    if (status != 0) return std::string("crawl of ") + name + " failed";
  }
  run_command(base + " sample --virtual-clock", status);
  if (status != 0) return "sample failed";
  run_command(base + " identify --virtual-clock", status);
  if (status != 0) return "identify failed";
  const std::string eval_out = run_command(base + " eval" + truth, status);
  if (status != 0) return "eval failed";
  const std::string cams_out = run_command(base + " cameras", status);
  if (status != 0) return "cameras failed";
  fs::remove_all(data);

  json report = json::parse(eval_out, nullptr, false);
  if (report.is_discarded()) return "eval printed no JSON";
  std::set<std::string> found;
  std::istringstream lines(cams_out);
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) found.insert(json::parse(line)["data_link"]["canonical_key"].get<std::string>());
  if (found != planted)
    return "camera set has " + std::to_string(found.size()) + " entries, planted " + std::to_string(planted.size());
  if (report["precision"] != 1.0 || report["recall"] != 1.0) return "eval: " + report.dump();
  return {};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<Check> checks = {
      {"oracle equivalence of percent and luminance difference", oracle_equivalence},
      {"checksum recall 1.0 and precision below luminance", checksum_recall_and_ordering},
      {"default thresholds 0.11 / 1.3 and verdict flips", default_thresholds},
      {"crawler fixture suite", crawler_suite},
      {"query-string dedup", dedup},
      {"stream liveness", stream_liveness},
      {"evaluator oracle, monotonicity and selection", evaluator},
      {"benchmark ordering checksum < luminance", benchmark},
      {"end-to-end CLI over the fixture suite", end_to_end},
  };
  int failures = 0;
  for (const auto& check : checks) {
    std::string why;
    try {
      why = check.run();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    if (why.empty()) {
      std::cout << "PASS " << check.name << "\n";
    } else {
      std::cout << "FAIL " << check.name << ": " << why << "\n";
      ++failures;
    }
    std::cout.flush();
  }
  return failures;
}
