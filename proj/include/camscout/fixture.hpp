#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "camscout/clock.hpp"
#include "camscout/fetcher.hpp"
#include "camscout/image.hpp"
#include "camscout/sampler.hpp"

namespace camscout {

// Serves a whole synthetic web site from a JSON description, for offline
// runs and tests. Layout:
//
//   {
//     "planted_cameras": ["http://cams.test/cam/1.jpg"],
//     "resources": {
//       "http://cams.test/": {"body": "<a href=/list>list</a>"},
//       "http://cams.test/cam/1.jpg": {"image": {"width": 64, "height": 48,
//                                               "noise": 40, "vary_s": 60}},
//       "http://cams.test/old": {"redirect": "/list"},
//       "http://cams.test/map": {"body": "...", "xhr": ["http://cams.test/cams.geojson"]},
//       "http://cams.test/cams.geojson": {"json": {...}}
//     }
//   }
//
// Resource fields:
//   status, content_type            defaults 200 and a type inferred from the body
//   body | json | image | mjpeg     payload; text, any JSON value, or a generator
//   redirect                        302 to this (relative) location
//   xhr                             URLs whose responses a renderer would capture
//   delay_ms                        latency charged to the clock; >= timeout gives FetchTimeout
//   error                           "timeout" or "failed"
//   timeline                        [{"at_s": n, ...overrides}], entries with at_s <= seconds
//                                   since construction apply in order as JSON merge
//                                   patches (null deletes a field)
//
// image: {"format": "png"|"jpeg", "width", "height", "fill", "noise", "seed",
//         "vary_s": reseed the noise every n seconds (0 = static),
//         "drift_per_h": fill change per hour,
//         "counter": {"x","y","w","h"} patch (default 3x3) painted with the request count}
// mjpeg: {"boundary": "frame", "parts": n, "image": {...}}
//
// Unknown URLs answer 404.
class FixtureFetcher final : public Fetcher {
 public:
  FixtureFetcher(Clock& clock, nlohmann::json site);
  static nlohmann::json load_site(const std::filesystem::path& path);

  RenderedPage fetch(const Url& url, const FetchOptions& options) override;
  StreamCapture open_stream(const Url& url, std::size_t max_bytes, Duration timeout) override;

  struct Call {
    std::string url;
    Timestamp at{};
  };
  std::vector<Call> calls() const;
  std::vector<std::string> planted_cameras() const;
  int request_count(const std::string& url) const;

 private:
  struct Response {
    int status = 200;
    std::string content_type;
    std::string body;
    std::optional<std::string> location;
  };
  // Looks up and renders one resource; `count` is the request ordinal.
  Response render(const std::string& key, const nlohmann::json& spec, int count) const;
  const nlohmann::json* lookup(const Url& url, std::string& key) const;
  nlohmann::json effective_spec(const nlohmann::json& spec) const;
  int record(const std::string& key);

  Clock& clock_;
  nlohmann::json site_;
  Timestamp epoch_;
  mutable std::mutex mu_;
  std::vector<Call> calls_;
  std::map<std::string, int> counts_;
};

// Deterministic image generator used by fixtures and tests.
struct SyntheticImage {
  int width = 64;
  int height = 48;
  int fill = 128;
  int noise = 0;            // amplitude of uniform per-pixel noise
  std::uint32_t seed = 1;
  bool jpeg = false;

  GrayImage pixels() const;
  std::string encode() const;
};

// Benchmark corpus of `count` four-frame sets under the standard schedule.
// Even sets never change; odd sets get fresh noise per frame.
std::vector<FrameSet> synthetic_framesets(std::size_t count, int width = 64, int height = 48,
                                          std::uint32_t seed = 7);

}  // namespace camscout
