#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "dc/api/config.hpp"
#include "dc/federation/federation.hpp"
#include "dc/kg/store.hpp"

namespace httplib {
class Server;
}

namespace dc::api {

struct Request {
  std::string method;  // "GET", "POST", ...
  std::string target;  // raw path plus query, percent-encoded
  std::map<std::string, std::string> headers;  // names lower-cased
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;  // canonical JSON
  bool operator==(const Response&) const = default;
};

// The /v1 HTTP API independent of any socket layer. Every read goes through
// the federator (a plain local read when no bases are configured).
//
//   GET  /v1/node/{dcid}/arcs?direction=out|in
//   GET  /v1/node/{dcid}/triples?direction=&label=&provenance=
//   POST /v1/resolve                       {"description":{prop: value}}
//   GET  /v1/observation/point?variable=&entity=&date=
//   GET  /v1/observation/series?variable=&entity=&start=&end=
//   GET  /v1/observation/collection?variable=&parent=&childType=&date=
//   GET  /v1/variables?entity=
//   GET  /v1/info
//   POST /v1/admin/import                  {"kind":"nodes"|"csv","content":..,"template":..}
//
// Dcids in paths and query strings are percent-encoded. Unknown dcids give
// empty 200 payloads; only unknown routes give 404.
class Service {
 public:
  Service(kg::Store& store, ServerConfig config,
          std::vector<std::shared_ptr<federation::BaseClient>> clients);

  // Never throws; failures become error bodies.
  Response handle(const Request& request) const;

  const federation::Federator& federator() const noexcept { return federator_; }
  const ServerConfig& config() const noexcept { return config_; }

 private:
  Response route(const Request& request) const;
  Response admin_import(const Request& request) const;

  kg::Store& store_;
  ServerConfig config_;
  federation::Federator federator_;
  mutable std::mutex import_mutex_;
};

// BaseClient that calls a Service in-process, for embedding and tests.
class InProcessClient : public federation::BaseClient {
 public:
  InProcessClient(std::string endpoint, const Service& service, int timeout_ms = 5000)
      : endpoint_(std::move(endpoint)), service_(service), timeout_ms_(timeout_ms) {}
  const std::string& endpoint() const override { return endpoint_; }
  int timeout_ms() const override { return timeout_ms_; }
  std::string get(const std::string& target, const federation::RequestContext& context) override;
  std::string post(const std::string& target, const std::string& body,
                   const federation::RequestContext& context) override;

 private:
  std::string call(const char* method, const std::string& target, const std::string& body,
                   const federation::RequestContext& context);

  std::string endpoint_;
  const Service& service_;
  int timeout_ms_;
};

// Serves a Service over HTTP/1.1.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the address (port 0 picks a free port) and returns the bound port.
  // Throws Error(kConfig) when binding fails.
  int bind(const ListenAddress& address);
  // Blocks serving until stop().
  void run();
  // run() on a background thread.
  void start();
  void stop();

 private:
  const Service& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  bool bound_ = false;
  std::atomic<bool> ran_{false};
};

}  // namespace dc::api
