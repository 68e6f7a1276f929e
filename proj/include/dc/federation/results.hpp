#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dc/kg/types.hpp"
#include "dc/resolver/resolver.hpp"
#include "dc/stat/stat_api.hpp"

// Payloads returned by federated reads. `origins` parallels the item list:
// 0 = this instance, k = its k-th configured base (1-based).
namespace dc::federation {

inline constexpr std::string_view kWarnBaseUnavailable = "BaseUnavailable";
inline constexpr std::string_view kWarnTimeout = "Timeout";
inline constexpr std::string_view kWarnBadResponse = "BadResponse";
inline constexpr std::string_view kWarnLoopDetected = "LoopDetected";
inline constexpr std::string_view kWarnDepthExceeded = "DepthExceeded";

struct Warning {
  std::string code;
  std::string endpoint;
  std::string reason;
  bool operator==(const Warning&) const = default;
};

struct ArcsResult {
  std::vector<kg::Dcid> labels;
  std::vector<Warning> warnings;
  bool operator==(const ArcsResult&) const = default;
};

struct TriplesResult {
  std::vector<kg::Triple> triples;
  std::vector<int> origins;
  std::vector<Warning> warnings;
  bool operator==(const TriplesResult&) const = default;
};

struct ResolveResult {
  std::vector<resolver::Candidate> candidates;
  std::vector<int> origins;
  std::vector<Warning> warnings;
  bool operator==(const ResolveResult&) const = default;
};

struct PointResult {
  std::optional<stat::Observation> observation;
  int origin = 0;  // meaningful only with an observation
  std::vector<Warning> warnings;
  bool operator==(const PointResult&) const = default;
};

struct SeriesResult {
  stat::Series series;
  std::vector<int> origins;  // per point
  std::vector<Warning> warnings;
  bool operator==(const SeriesResult&) const = default;
};

struct CollectionResult {
  std::vector<stat::CollectionRow> rows;
  std::vector<int> origins;
  // Every child of the requested type known to any layer, with or without
  // data. Lets an overlay add its own rows for children it only learns
  // about from a base.
  std::vector<kg::Dcid> children;
  std::vector<Warning> warnings;
  bool operator==(const CollectionResult&) const = default;
};

struct VariablesResult {
  std::vector<kg::Dcid> variables;
  std::vector<int> origins;
  std::vector<Warning> warnings;
  bool operator==(const VariablesResult&) const = default;
};

struct BaseEndpoint {
  std::string url;
  int timeout_ms = 5000;
  bool operator==(const BaseEndpoint&) const = default;
};

struct InfoResult {
  std::string instance_id;
  std::vector<BaseEndpoint> bases;
  int max_depth = 4;
  std::uint64_t triple_count = 0;
  bool operator==(const InfoResult&) const = default;
};

}  // namespace dc::federation
