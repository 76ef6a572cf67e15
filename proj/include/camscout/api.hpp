#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "camscout/clock.hpp"
#include "camscout/store.hpp"

namespace httplib {
class Server;
}

namespace camscout {

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

using QueryParams = std::multimap<std::string, std::string>;

// Routing and handlers for the REST surface, independent of the socket
// layer so it can be driven directly.
//
//   GET  /api/cameras?domain=&kind=
//   GET  /api/cameras/{id}
//   GET  /api/cameras/{id}/frames/{n}       n = frame index, or an offset like "5m"
//   GET  /api/candidates?unlabeled=true
//   GET  /api/framesets/{id}
//   GET  /api/framesets/{id}/frames/{n}
//   GET  /api/labels
//   POST /api/labels {frameset_id, label, labeler}
//   GET  /api/eval?method=&threshold=
//
// Errors are {"error": kind, "message": text}: 400 bad input, 404 unknown
// id, 409 conflicting label, 422 label rejected by the labeling protocol.
class Api {
 public:
  Api(Store& store, Clock& clock);
  ApiResponse handle(std::string_view method, std::string_view path, const QueryParams& query,
                     std::string_view body);

 private:
  ApiResponse list_cameras(const QueryParams& query) const;
  ApiResponse camera(const std::string& id) const;
  ApiResponse camera_frame(const std::string& id, const std::string& which) const;
  ApiResponse candidates(const QueryParams& query) const;
  ApiResponse frameset(const std::string& id) const;
  ApiResponse frameset_frame(const std::string& id, const std::string& which) const;
  ApiResponse post_label(std::string_view body);
  ApiResponse eval(const QueryParams& query) const;

  Store& store_;
  Clock& clock_;
  std::mutex write_mu_;  // writes are serialized
};

// Binds the API (and optionally a static UI directory at /) to a socket.
class ApiServer {
 public:
  ApiServer(Api& api, std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~ApiServer();

  // Binds to port 0 for an ephemeral port; returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();

 private:
  Api& api_;
  std::unique_ptr<httplib::Server> server_;
};

// "HOST:PORT" with either part optional; defaults 127.0.0.1 and 8080.
std::pair<std::string, int> parse_listen_address(std::string_view text);

}  // namespace camscout
