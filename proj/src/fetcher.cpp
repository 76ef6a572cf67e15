#include "camscout/fetcher.hpp"

#include <chrono>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "camscout/error.hpp"

namespace camscout {

namespace {

std::unique_ptr<httplib::Client> make_client(const Url& url, Duration timeout) {
  if (!url.is_http()) throw Error(ErrorKind::FetchFailed, "unsupported scheme " + url.scheme);
  std::string base = url.scheme + "://" + url.host;
  if (url.port) base += ":" + std::to_string(*url.port);
  auto client = std::make_unique<httplib::Client>(base);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client->set_connection_timeout(secs.count(), usecs.count());
  client->set_read_timeout(secs.count(), usecs.count());
  client->set_write_timeout(secs.count(), usecs.count());
  client->set_follow_location(false);
  client->enable_server_certificate_verification(false);
  return client;
}

[[noreturn]] void raise_transport(httplib::Error err, const Url& url) {
  const std::string what = url.to_string() + ": " + httplib::to_string(err);
  if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
    throw Error(ErrorKind::FetchTimeout, what);
  throw Error(ErrorKind::FetchFailed, what);
}

}  // namespace

StaticFetcher::StaticFetcher(const Clock& clock, std::string user_agent)
    : clock_(clock), user_agent_(std::move(user_agent)) {}

RenderedPage StaticFetcher::fetch(const Url& url, const FetchOptions& options) {
  auto client = make_client(url, options.timeout);
  httplib::Headers headers{{"User-Agent", user_agent_}};
  auto res = client->Get(url.path_and_query(), headers);
  if (!res) raise_transport(res.error(), url);
  RenderedPage page;
  page.url = url.to_string();
  page.status = res->status;
  page.content_type = res->get_header_value("Content-Type");
  page.html = std::move(res->body);
  page.fetched_at = clock_.now();
  if (res->has_header("Location")) page.location = res->get_header_value("Location");
  return page;
}

StreamCapture StaticFetcher::open_stream(const Url& url, std::size_t max_bytes, Duration timeout) {
  auto client = make_client(url, timeout);
  httplib::Headers headers{{"User-Agent", user_agent_}};
  StreamCapture capture;
  auto res = client->Get(
      url.path_and_query(), headers,
      [&](const httplib::Response& r) {
        capture.status = r.status;
        capture.content_type = r.get_header_value("Content-Type");
        return true;
      },
      [&](const char* data, std::size_t len) {
        std::size_t room = max_bytes - capture.bytes.size();
        capture.bytes.append(data, std::min(room, len));
        if (capture.bytes.size() >= max_bytes) {
          capture.truncated = true;
          return false;
        }
        return true;
      });
  if (!res && !(capture.truncated && res.error() == httplib::Error::Canceled)) {
    // A live stream that outlasts the read timeout still produced bytes.
    if (capture.bytes.empty()) raise_transport(res.error(), url);
    capture.truncated = true;
  }
  return capture;
}

RenderServiceFetcher::RenderServiceFetcher(const Clock& clock, std::string endpoint)
    : clock_(clock), endpoint_(std::move(endpoint)), direct_(clock) {}

RenderedPage RenderServiceFetcher::fetch(const Url& url, const FetchOptions& options) {
  if (classify_link(url).kind != LinkKind::Page) return direct_.fetch(url, options);
  const Url endpoint = Url::parse(endpoint_);
  auto client = make_client(endpoint, options.timeout + options.render_wait);
  nlohmann::json request{
      {"url", url.to_string()},
      {"wait", std::chrono::duration<double>(options.render_wait).count()},
  };
  auto res = client->Post(endpoint.path_and_query(), request.dump(), "application/json");
  if (!res) raise_transport(res.error(), url);
  if (res->status == 504) throw Error(ErrorKind::FetchTimeout, url.to_string() + ": renderer timed out");
  if (res->status < 200 || res->status >= 300)
    throw Error(ErrorKind::FetchFailed, "renderer returned HTTP " + std::to_string(res->status));
  auto doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error(ErrorKind::FetchFailed, "renderer returned a non-JSON body");

  RenderedPage page;
  page.url = doc.value("url", url.to_string());
  page.status = doc.value("status", 200);
  page.content_type = doc.value("content_type", std::string("text/html"));
  page.html = doc.value("html", std::string());
  page.fetched_at = clock_.now();
  if (doc.contains("location") && doc["location"].is_string()) page.location = doc["location"].get<std::string>();
  if (auto it = doc.find("xhr"); it != doc.end() && it->is_array()) {
    for (const auto& entry : *it) {
      if (!entry.is_object()) continue;
      page.xhr_responses.push_back({entry.value("url", std::string()),
                                    entry.value("content_type", std::string()),
                                    entry.value("body", std::string())});
    }
  }
  return page;
}

StreamCapture RenderServiceFetcher::open_stream(const Url& url, std::size_t max_bytes, Duration timeout) {
  return direct_.open_stream(url, max_bytes, timeout);
}

RenderedPage fetch_following_redirects(Fetcher& fetcher, const Url& url, const FetchOptions& options,
                                       int max_hops, const std::function<bool(const Url&)>& allow_hop) {
  Url current = url;
  for (int hop = 0;; ++hop) {
    RenderedPage page = fetcher.fetch(current, options);
    if (!page.is_redirect()) return page;
    if (hop >= max_hops) throw Error(ErrorKind::FetchFailed, "too many redirects from " + url.to_string());
    auto target = try_resolve(current, *page.location);
    if (!target) throw Error(ErrorKind::FetchFailed, "bad redirect location '" + *page.location + "'");
    target->fragment.reset();
    if (allow_hop && !allow_hop(*target)) {
      page.location = target->to_string();
      return page;
    }
    current = *target;
  }
}

}  // namespace camscout
