#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>

namespace paqs::gateway {

inline constexpr const char* kSchemaVersion = "1.0";

struct Limits {
  int max_modes = 16;
  int max_photons = 5;
  std::size_t max_nodes = 1024;
  int max_raster_side = 1000;
  int max_realizations = 100000;
  std::size_t max_body_bytes = 8u << 20;
  double time_budget_s = 30.0;
};

struct Request {
  std::string method;  // "GET", "POST", ...
  std::string path;    // e.g. "/api/v1/qw"
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Pure request handler: no I/O, no shared state.  The HTTP server is a thin
// adapter over this.
Response dispatch(const Request& request, const Limits& limits = {});

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;  // served at "/" when non-empty
  std::string cors_origin = "*";
  Limits limits;
};

// Blocks until the server stops.  Returns non-zero if binding failed.
int serve(const ServerOptions& options);

// Runs the same server on a background thread; port 0 picks a free port.
// The destructor stops the server and joins the thread.
class BackgroundServer {
 public:
  explicit BackgroundServer(const ServerOptions& options);
  ~BackgroundServer();
  BackgroundServer(const BackgroundServer&) = delete;
  BackgroundServer& operator=(const BackgroundServer&) = delete;

  int port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace paqs::gateway
