#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dc/federation/results.hpp"
#include "dc/kg/store.hpp"
#include "dc/resolver/resolver.hpp"
#include "dc/stat/stat_api.hpp"

namespace dc::federation {

inline constexpr std::string_view kVisitedHeader = "X-DC-Visited";
inline constexpr std::string_view kDepthHeader = "X-DC-Depth";

struct LayerConfig {
  std::string instance_id;
  std::vector<BaseEndpoint> bases;  // consulted in this order
  int max_depth = 4;

  // Throws Error(kConfig): empty id, ids containing ',', bad URLs,
  // non-positive timeouts, negative depth.
  void validate() const;
};

// True for http://host[:port][/path] style URLs.
bool is_valid_endpoint(std::string_view url);

// Federation state carried by a request.
struct RequestContext {
  std::vector<std::string> visited;  // instance ids already on the call path
  std::optional<int> depth;          // remaining base hops; unset = use max_depth

  // Parses the two headers; throws Error(kBadRequest) on a malformed depth.
  static RequestContext from_headers(std::string_view visited, std::string_view depth);
  std::string visited_header() const;
};

// Outcome of the loop guard for one incoming request.
struct GuardDecision {
  bool consult_bases = false;
  std::optional<Warning> warning;  // LoopDetected or DepthExceeded
  RequestContext outgoing;         // context to send to bases
};

// A request is answered locally only when this instance is already in the
// visited list (LoopDetected) or no depth remains while bases are configured
// (DepthExceeded). Otherwise bases are consulted with this instance appended
// and depth decremented.
GuardDecision loop_guard(const LayerConfig& config, const RequestContext& context);

// Failure talking to a base; code is one of the kWarn* constants.
class BaseFailure : public std::runtime_error {
 public:
  BaseFailure(std::string_view code, const std::string& reason)
      : std::runtime_error(reason), code_(code) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Transport to one base instance speaking the wire protocol. Calls return
// the body of a 2xx response and throw BaseFailure otherwise.
class BaseClient {
 public:
  virtual ~BaseClient() = default;
  virtual const std::string& endpoint() const = 0;
  virtual int timeout_ms() const = 0;
  // `target` is path plus query string, e.g. "/v1/variables?entity=geoId%2F06".
  virtual std::string get(const std::string& target, const RequestContext& context) = 0;
  virtual std::string post(const std::string& target, const std::string& body,
                           const RequestContext& context) = 0;
};

// Answers reads from the local store merged with the configured bases.
// Local items come first and shadow base items; bases are merged in config
// order. A failing base only adds a warning. Base calls for one request run
// concurrently. There is no response cache.
class Federator {
 public:
  // clients[i] serves config.bases[i].
  Federator(const kg::Store& store, LayerConfig config,
            std::vector<std::shared_ptr<BaseClient>> clients);

  const LayerConfig& config() const noexcept { return config_; }

  ArcsResult arcs(const kg::Dcid& node, kg::Direction direction,
                  const RequestContext& context = {}) const;
  // Without a label: all triples of the node in that direction.
  TriplesResult triples(const kg::Dcid& node, const std::optional<kg::Dcid>& label,
                        kg::Direction direction, const std::optional<kg::Dcid>& provenance,
                        const RequestContext& context = {}) const;
  ResolveResult resolve(const resolver::Description& description,
                        const RequestContext& context = {}) const;
  PointResult point(const kg::Dcid& variable, const kg::Dcid& entity,
                    const stat::DateSelector& date, const RequestContext& context = {}) const;
  SeriesResult series(const kg::Dcid& variable, const kg::Dcid& entity,
                      const std::optional<kg::PartialDate>& start,
                      const std::optional<kg::PartialDate>& end,
                      const RequestContext& context = {}) const;
  CollectionResult collection(const kg::Dcid& variable, const kg::Dcid& parent,
                              const kg::Dcid& child_type, const stat::DateSelector& date,
                              const RequestContext& context = {}) const;
  VariablesResult variables(const kg::Dcid& entity, const RequestContext& context = {}) const;
  InfoResult info() const;

 private:
  struct Reply {
    std::optional<std::string> body;
    std::optional<Warning> failure;
  };
  template <class Call>
  std::vector<Reply> fan_out(const RequestContext& outgoing, Call call) const;
  template <class T, class Call>
  std::vector<std::optional<T>> gather(const GuardDecision& guard, std::vector<Warning>& warnings,
                                       Call call) const;

  const kg::Store& store_;
  LayerConfig config_;
  std::vector<std::shared_ptr<BaseClient>> clients_;
};

}  // namespace dc::federation
