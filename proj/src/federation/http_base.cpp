#include "dc/federation/http_base.hpp"

#include <chrono>

#include <httplib.h>

namespace dc::federation {

namespace {

httplib::Headers federation_headers(const RequestContext& context) {
  httplib::Headers h;
  h.emplace(std::string(kVisitedHeader), context.visited_header());
  if (context.depth) h.emplace(std::string(kDepthHeader), std::to_string(*context.depth));
  return h;
}

}  // namespace

HttpBaseClient::HttpBaseClient(BaseEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  const std::string& url = endpoint_.url;
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  origin_ = url.substr(0, path_start);
  if (path_start != std::string::npos) {
    prefix_ = url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
}

template <class Send>
static std::string perform(const std::string& origin, const BaseEndpoint& endpoint, Send send) {
  httplib::Client client(origin);
  const auto timeout = std::chrono::milliseconds(endpoint.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_url_encode(false);  // targets arrive fully percent-encoded
  const auto start = std::chrono::steady_clock::now();
  httplib::Result res = send(client);
  if (!res) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    const bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                           (res.error() == httplib::Error::Read && elapsed >= timeout * 9 / 10);
    throw BaseFailure(timed_out ? kWarnTimeout : kWarnBaseUnavailable,
                      httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BaseFailure(kWarnBadResponse, "HTTP " + std::to_string(res->status));
  }
  return std::move(res->body);
}

std::string HttpBaseClient::get(const std::string& target, const RequestContext& context) {
  return perform(origin_, endpoint_, [&](httplib::Client& c) {
    return c.Get(prefix_ + target, federation_headers(context));
  });
}

std::string HttpBaseClient::post(const std::string& target, const std::string& body,
                                 const RequestContext& context) {
  return perform(origin_, endpoint_, [&](httplib::Client& c) {
    return c.Post(prefix_ + target, federation_headers(context), body, "application/json");
  });
}

std::vector<std::shared_ptr<BaseClient>> make_http_clients(const LayerConfig& config) {
  std::vector<std::shared_ptr<BaseClient>> out;
  for (const BaseEndpoint& b : config.bases) out.push_back(std::make_shared<HttpBaseClient>(b));
  return out;
}

}  // namespace dc::federation
