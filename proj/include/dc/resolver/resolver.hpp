#pragma once

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dc/kg/store.hpp"
#include "dc/kg/types.hpp"

namespace dc::resolver {

// Value side of a description constraint. A bare string matches either a
// text literal or a reference with that dcid; a typed NodeValue matches only
// an equal object.
using DescriptionValue = std::variant<std::string, kg::NodeValue>;

// Conjunctive structured description, e.g. {name: "Georgia", typeOf: Country}.
struct Description {
  std::map<kg::Dcid, DescriptionValue> constraints;
  bool operator==(const Description&) const = default;
};

struct Candidate {
  kg::Dcid dcid;
  // Ordering hint only: 1.0 exact-case name match, 0.9 case-insensitive only.
  double score = 1.0;
  bool operator==(const Candidate&) const = default;
};

// Sorted by descending score, then dcid.
struct ResolutionResult {
  std::vector<Candidate> candidates;
  bool operator==(const ResolutionResult&) const = default;
};

inline constexpr double kExactScore = 1.0;
inline constexpr double kCaseInsensitiveScore = 0.9;

// Candidates are exactly the nodes n with a triple (n, p, v) for every (p, v)
// in the description; `name` compares ASCII case-insensitively. Throws
// Error(kInvalidDescription) on an empty description.
ResolutionResult resolve(const Description& d, const kg::Store& graph);

// Element-wise resolve; an invalid element yields an error entry in place.
struct BatchEntry {
  std::variant<ResolutionResult, std::string> outcome;  // result or error message
  bool operator==(const BatchEntry&) const = default;
};
std::vector<BatchEntry> resolve_batch(std::span<const Description> ds, const kg::Store& graph);

// True when the candidate's own triples satisfy every constraint.
bool matches(const kg::Dcid& node, const Description& d, const kg::Store& graph);

}  // namespace dc::resolver
