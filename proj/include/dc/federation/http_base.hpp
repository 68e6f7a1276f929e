#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dc/federation/federation.hpp"

namespace dc::federation {

// BaseClient over HTTP/1.1. Connect, read and write timeouts all use the
// configured per-base timeout.
class HttpBaseClient : public BaseClient {
 public:
  explicit HttpBaseClient(BaseEndpoint endpoint);

  const std::string& endpoint() const override { return endpoint_.url; }
  int timeout_ms() const override { return endpoint_.timeout_ms; }
  std::string get(const std::string& target, const RequestContext& context) override;
  std::string post(const std::string& target, const std::string& body,
                   const RequestContext& context) override;

 private:
  BaseEndpoint endpoint_;
  std::string origin_;  // scheme://host:port
  std::string prefix_;  // path prefix without trailing '/'
};

std::vector<std::shared_ptr<BaseClient>> make_http_clients(const LayerConfig& config);

}  // namespace dc::federation
