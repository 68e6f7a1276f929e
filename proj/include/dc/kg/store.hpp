#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "dc/kg/types.hpp"

namespace dc::kg {

namespace sql {
class Connection;
}

// Row of the derived observation index. One row per `value` triple on a
// StatVarObservation node; provenance is that triple's provenance.
struct ObservationRow {
  Dcid node;
  Dcid variable;
  Dcid entity;
  PartialDate date;
  Decimal value;
  std::optional<Dcid> unit;
  std::optional<Dcid> measurement_method;
  Dcid provenance;
  PartialDate provenance_import_date;
};

// Persistent triple store on a single SQLite file (":memory:" for an
// ephemeral store).
//
// Readers run concurrently; insert_triples / register_provenance take an
// exclusive phase so readers see a batch either entirely or not at all.
// Navigation is total: unknown nodes yield empty results.
//
// Result order for neighbors / node_triples: out-direction by
// (predicate, object key, provenance); in-direction by
// (predicate, subject, provenance).
class Store {
 public:
  explicit Store(const std::string& path);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  const std::string& path() const noexcept { return path_; }

  // Idempotent for identical records; ProvenanceConflict otherwise.
  void register_provenance(const Provenance& p);
  std::optional<Provenance> provenance(const Dcid& dcid) const;
  std::vector<Provenance> provenances() const;

  // Atomic. Returns the number of triples not already present. When `fresh`
  // is given it receives one flag per input triple (true = newly stored,
  // false = already present or an earlier duplicate in the same batch).
  std::size_t insert_triples(std::span<const Triple> triples,
                             std::vector<bool>* fresh = nullptr);

  std::vector<Dcid> arc_labels(const Dcid& node, Direction direction) const;
  std::vector<Triple> neighbors(const Dcid& node, const Dcid& label, Direction direction,
                                const std::optional<Dcid>& provenance_filter = {}) const;
  std::vector<Triple> node_triples(const Dcid& node, Direction direction) const;

  // Every triple, ordered by (subject, predicate, object key, provenance).
  std::vector<Triple> all_triples() const;
  void for_each_triple(const std::function<void(const Triple&)>& fn) const;
  std::size_t triple_count() const;

  // Subjects having a triple (s, predicate, o) where o's key equals
  // value.key(); for text values the comparison is ASCII case-insensitive
  // when fold_case is set. Sorted, unique.
  std::vector<Dcid> subjects_with(const Dcid& predicate, const NodeValue& value,
                                  bool fold_case) const;
  // Same lookup that also accepts a ref object whose dcid equals the text.
  std::vector<Dcid> subjects_with_text_or_ref(const Dcid& predicate, const std::string& text,
                                              bool fold_case) const;

  // Derived indexes, maintained inside the writer's exclusive phase.
  std::vector<ObservationRow> observations(const Dcid& variable, const Dcid& entity) const;
  std::vector<ObservationRow> observations_for_entities(const Dcid& variable,
                                                        std::span<const Dcid> entities) const;
  std::vector<Dcid> variables_for(const Dcid& entity) const;
  std::vector<Dcid> observed_variables() const;
  std::vector<Dcid> observed_entities() const;
  // Nodes typed child_type whose containedInPlace closure (depth <= 8)
  // includes parent. Sorted.
  std::vector<Dcid> contained_children(const Dcid& parent, const Dcid& child_type) const;
  void rebuild_derived_indexes();

 private:
  class Lease;
  Lease acquire() const;
  void release(std::unique_ptr<sql::Connection> conn) const;

  std::string path_;
  std::size_t max_connections_;
  mutable std::shared_mutex phase_;
  mutable std::mutex pool_mutex_;
  mutable std::condition_variable pool_cv_;
  mutable std::vector<std::unique_ptr<sql::Connection>> idle_;
  mutable std::size_t open_connections_ = 0;
};

}  // namespace dc::kg
