#pragma once

#include <cctype>
#include <string>

#include <httplib.h>

#include "posiqueue/error.hpp"
#include "posiqueue/service/api.hpp"

namespace posiqueue::service {

inline Request from_httplib(const httplib::Request& r) {
  Request out;
  out.method = r.method;
  out.path = r.path;
  for (const auto& [k, v] : r.params) out.query.emplace(k, v);
  out.body = r.body;
  for (const auto& [k, v] : r.headers) {
    std::string key = k;
    for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.headers[key] = v;
  }
  return out;
}

/// Binds an Api to cpp-httplib. Handlers run on the library's worker pool.
class HttpServer {
 public:
  explicit HttpServer(Api& api) : api_(api) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      auto out = api_.handle(from_httplib(req));
      res.status = out.status;
      for (const auto& [k, v] : out.headers)
        if (k != "Content-Type") res.set_header(k, v);
      res.set_content(out.body, "application/json");
    };
    server_.Get(".*", handler);
    server_.Post(".*", handler);
    server_.Put(".*", handler);
    server_.Options(".*", handler);
  }

  /// Binds `host:port`; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port) {
    int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorCode::io_error, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
  }

  /// Serves until stop() is called.
  bool run() { return server_.listen_after_bind(); }

  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

 private:
  Api& api_;
  httplib::Server server_;
};

}  // namespace posiqueue::service
