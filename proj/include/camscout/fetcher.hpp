#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "camscout/clock.hpp"
#include "camscout/linkmodel.hpp"

namespace camscout {

struct XhrResponse {
  std::string request_url;
  std::string content_type;
  std::string body;
};

// What a fetcher hands back for one URL. `html` holds the response body for
// any content type (image bytes included); the name follows its main use.
struct RenderedPage {
  std::string url;  // URL actually fetched
  int status = 0;
  std::string content_type;
  std::string html;
  std::vector<XhrResponse> xhr_responses;
  Timestamp fetched_at{};
  std::optional<std::string> location;  // redirect target for 3xx

  bool ok() const { return status >= 200 && status < 300; }
  bool is_redirect() const { return status >= 300 && status < 400 && location.has_value(); }
};

// First bytes of an unbounded response (MJPG, live feeds).
struct StreamCapture {
  int status = 0;
  std::string content_type;
  std::string bytes;
  bool truncated = false;  // stopped at max_bytes rather than end of stream
};

struct FetchOptions {
  Duration timeout{180'000};
  Duration render_wait{8'000};
};

// Transport contract shared by the crawler, the sampler and stream probing.
// Implementations do not follow redirects; they report 3xx with `location`
// and let the caller decide. They must give up after `timeout` and throw
// Error(FetchTimeout); connection failures throw Error(FetchFailed).
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual RenderedPage fetch(const Url& url, const FetchOptions& options) = 0;
  virtual StreamCapture open_stream(const Url& url, std::size_t max_bytes, Duration timeout) = 0;
};

// Plain HTTP GET without JavaScript; xhr_responses is always empty.
class StaticFetcher final : public Fetcher {
 public:
  explicit StaticFetcher(const Clock& clock, std::string user_agent = "camscout/1.0");
  RenderedPage fetch(const Url& url, const FetchOptions& options) override;
  StreamCapture open_stream(const Url& url, std::size_t max_bytes, Duration timeout) override;

 private:
  const Clock& clock_;
  std::string user_agent_;
};

// Delegates rendering to an external headless browser service. Request:
//   POST <endpoint>  {"url": "...", "wait": <seconds>}
// Response:
//   {"url": "...", "status": 200, "html": "...",
//    "xhr": [{"url": "...", "content_type": "...", "body": "..."}]}
// Non-page resources (images, streams) bypass the renderer and go through
// StaticFetcher.
class RenderServiceFetcher final : public Fetcher {
 public:
  RenderServiceFetcher(const Clock& clock, std::string endpoint);
  RenderedPage fetch(const Url& url, const FetchOptions& options) override;
  StreamCapture open_stream(const Url& url, std::size_t max_bytes, Duration timeout) override;

  // Env var naming the endpoint.
  static constexpr const char* kEndpointEnv = "CAMSCOUT_RENDERER_URL";

 private:
  const Clock& clock_;
  std::string endpoint_;
  StaticFetcher direct_;
};

// Fetches `url`, following up to `max_hops` redirects. The returned page's
// url is the final location. When `allow_hop` rejects a redirect target the
// 3xx response itself is returned. Throws Error(FetchFailed) on a redirect
// loop longer than max_hops.
RenderedPage fetch_following_redirects(Fetcher& fetcher, const Url& url, const FetchOptions& options,
                                       int max_hops = 5,
                                       const std::function<bool(const Url&)>& allow_hop = {});

}  // namespace camscout
