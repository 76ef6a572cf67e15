#include <doctest.h>

#include <random>

#include "camscout/fixture.hpp"
#include "camscout/records.hpp"
#include "test_support.hpp"

using namespace camscout;
using nlohmann::json;

namespace {

template <class T>
T round_trip(const T& v) {
  // Through text, like the record files.
  return json::parse(json(v).dump()).get<T>();
}

DataLink random_link(std::mt19937& rng) {
  const char* urls[] = {"http://a.test/c/1.jpg?t=5", "rtsp://b.test:8554/live", "http://c.test/v.m3u8",
                        "http://d.test/s.mjpg", "rtmp://e.test/app/x"};
  auto link = make_data_link(Url::parse(urls[rng() % 5]), rng() % 2 ? Provenance::HtmlEmbed : Provenance::XhrPayload,
                             "http://a.test/page");
  link->seed_domain = "a.test";
  link->depth = static_cast<int>(rng() % 16);
  link->discovered_at = from_unix_ms(1546300800000 + static_cast<std::int64_t>(rng() % 100000000));
  return *link;
}

}  // namespace

TEST_CASE("data link JSON uses readable enum names") {
  DataLink link = testsupport::image_link("http://t.test/c.jpg?x=1");
  json j = link;
  CHECK(j["kind"] == "Image");
  CHECK(j["provenance"] == "HtmlEmbed");
  CHECK(j["canonical_key"] == "http://t.test/c.jpg");
  CHECK(j.value("stream_kind", nlohmann::json()).is_null());
  CHECK(round_trip(link) == link);
}

TEST_CASE("property: records survive a JSON round trip") {
  std::mt19937 rng(123);
  for (int i = 0; i < 300; ++i) {
    DataLink link = random_link(rng);
    CHECK(round_trip(link) == link);

    ClassificationResult c;
    c.link = link;
    c.method = static_cast<Method>(rng() % 5);
    c.score = static_cast<double>(rng() % 10000) / 97.0;
    c.threshold = 1.3;
    c.is_camera = rng() % 2;
    c.verdict = static_cast<Verdict>(rng() % 3);
    c.frames_used = {Duration{0}, Duration{static_cast<std::int64_t>(rng() % 43200000)}};
    c.note = rng() % 2 ? "" : "note \"quoted\"";
    CHECK(round_trip(c) == c);

    CameraRecord cam{link_id(link.canonical_key), link, c, link.discovered_at,
                     link.discovered_at + Duration{static_cast<std::int64_t>(rng() % 1000000)},
                     {md5_hex(std::to_string(i)), md5_hex("x")}};
    CHECK(round_trip(cam) == cam);

    LabeledSample s{link_id(link.canonical_key), rng() % 2 ? Label::NetworkCamera : Label::OtherWebAsset,
                    "labeler" + std::to_string(rng() % 3), link.discovered_at, rng() % 5000};
    CHECK(round_trip(s) == s);

    PrPoint p{static_cast<double>(rng() % 300) / 100.0, std::nullopt, 0.25};
    if (rng() % 2) p.precision = 0.5;
    CHECK(round_trip(p) == p);
  }
}

TEST_CASE("manifests record frame references and change counts") {
  const GrayImage a(4, 4, 0);
  GrayImage b = a;
  b.pixels[0] = 1;
  FrameSet fs = testsupport::frameset_of({a, std::nullopt, b, a});
  FrameSetManifest m = make_manifest(fs);
  CHECK(m.id == fs.id());
  REQUIRE(m.frames.size() == 4);
  CHECK_FALSE(m.frames[1].has_value());
  CHECK(m.frames[0]->checksum == to_hex(fs.frames[0]->checksum));
  CHECK(m.frames[0]->width == 4);
  CHECK(m.frames[0]->decode_ok);
  CHECK(m.pixel_change_count == std::vector<std::optional<std::size_t>>{std::nullopt, 1u, 0u});
  CHECK(m.bytes_ever_changed());
  CHECK(round_trip(m) == m);
  json j = m;
  CHECK(j["offsets_ms"] == json::array({0, 300000, 3600000, 43200000}));
  CHECK(j["frames"][1].is_null());

  CHECK_FALSE(make_manifest(testsupport::frameset_of({a, a})).bytes_ever_changed());
}

TEST_CASE("eval reports keep absent rates absent") {
  EvalReport r = compute_metrics({false, false}, {true, false});
  r.method = "LuminanceDiff";
  r.pr_curve = {{1.0, std::nullopt, 0.0}};
  json j = r;
  CHECK(j["precision"].is_null());
  CHECK(j["recall"] == 0.0);
  EvalReport back = round_trip(r);
  CHECK_FALSE(back.precision.has_value());
  CHECK(back.recall == 0.0);
  CHECK(back.tn == 1);
  CHECK(back.pr_curve == r.pr_curve);
}

TEST_CASE("crawl report lines round-trip a real crawl") {
  json site = FixtureFetcher::load_site(std::string(CAMSCOUT_FIXTURE_DIR) + "/img_embedded.json");
  VirtualClock clock;
  FixtureFetcher fetcher(clock, site);
  CrawlReport report = crawl(site["seed"], CrawlConfig{}, fetcher, clock);
  auto lines = crawl_report_lines(report);
  REQUIRE(lines.size() == report.data_links.size() + 1);
  CHECK(lines.front()["record"] == "data_link");
  const json& summary = lines.back();
  CHECK(summary["record"] == "crawl_report");
  CHECK(summary["data_link_count"] == report.data_links.size());
  CHECK(summary["per_depth_counts"]["1"]["data_links"] == 4);

  std::vector<json> reparsed;
  for (const auto& l : lines) reparsed.push_back(json::parse(l.dump()));
  CrawlReport back = crawl_report_from_lines(reparsed);
  CHECK(back.seed_url == report.seed_url);
  CHECK(back.data_links == report.data_links);
  CHECK(back.per_depth_counts == report.per_depth_counts);
  CHECK(back.errors == report.errors);
  CHECK(back.visited_pages == report.visited_pages);
  CHECK(back.pages_crawled == report.pages_crawled);
}

TEST_CASE("PR curve CSV") {
  CHECK(pr_curve_csv({{0.5, 0.9, 1.0}, {2.0, std::nullopt, 0.0}}) == "threshold,precision,recall\n0.5,0.9,1\n2,,0\n");
}
