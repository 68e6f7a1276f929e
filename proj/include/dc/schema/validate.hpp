#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dc/kg/store.hpp"
#include "dc/kg/types.hpp"

namespace dc::schema {

enum class ViolationKind {
  kUndeclaredProperty,  // predicate not typed Property (warning)
  kRangeViolation,
  kDomainViolation,
  kDuplicateStatVar,
  kIncompleteStatVar,
  kUnknownStatType,  // warning
  kContainmentCycle,
};

std::string_view to_string(ViolationKind kind);
bool is_warning(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  kg::Dcid subject;
  std::optional<kg::Dcid> predicate;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

// Conformance check against the vocabulary present in the graph. Never
// mutates. Subjects and objects without declared types are not checked
// (open world); statistical-variable constraint arcs are checked against
// the variable's population type rather than StatisticalVariable.
// Ordered by (subject, kind, predicate, detail).
std::vector<Violation> validate(const kg::Store& graph);

}  // namespace dc::schema
