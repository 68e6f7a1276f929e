#include "dc/kg/store.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "dc/error.hpp"
#include "dc/kg/terms.hpp"
#include "sqlite.hpp"

namespace dc::kg {
namespace {

constexpr std::string_view kSchema = R"sql(
CREATE TABLE IF NOT EXISTS provenance(
  dcid TEXT PRIMARY KEY,
  source_url TEXT NOT NULL,
  import_name TEXT NOT NULL,
  import_date TEXT NOT NULL
) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS triples(
  subject TEXT NOT NULL,
  predicate TEXT NOT NULL,
  object TEXT NOT NULL,
  provenance TEXT NOT NULL,
  object_ref TEXT,
  object_fold TEXT NOT NULL,
  PRIMARY KEY(subject, predicate, object, provenance)
) WITHOUT ROWID;
CREATE INDEX IF NOT EXISTS triples_by_ref
  ON triples(object_ref, predicate, subject, provenance) WHERE object_ref IS NOT NULL;
CREATE INDEX IF NOT EXISTS triples_by_value ON triples(predicate, object_fold);
CREATE INDEX IF NOT EXISTS triples_by_provenance ON triples(provenance);
CREATE TABLE IF NOT EXISTS observations(
  node TEXT NOT NULL,
  variable TEXT NOT NULL,
  entity TEXT NOT NULL,
  date TEXT NOT NULL,
  value TEXT NOT NULL,
  unit TEXT,
  mmethod TEXT,
  provenance TEXT NOT NULL,
  PRIMARY KEY(node, provenance, value)
) WITHOUT ROWID;
CREATE INDEX IF NOT EXISTS observations_by_series ON observations(variable, entity, date);
CREATE INDEX IF NOT EXISTS observations_by_entity ON observations(entity, variable);
CREATE TABLE IF NOT EXISTS containment(
  ancestor TEXT NOT NULL,
  child TEXT NOT NULL,
  depth INTEGER NOT NULL,
  PRIMARY KEY(ancestor, child)
) WITHOUT ROWID;
)sql";

std::string fold_ascii(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::string fold_key(const NodeValue& v) {
  std::string key = v.key();
  return v.kind() == ValueKind::kText ? fold_ascii(std::move(key)) : key;
}

Triple read_triple(sql::Statement& s, int first = 0) {
  return Triple{Dcid(s.text(first)), Dcid(s.text(first + 1)), NodeValue::from_key(s.text(first + 2)),
                Dcid(s.text(first + 3))};
}

std::vector<Dcid> read_dcids(sql::Query& q) {
  std::vector<Dcid> out;
  while (q->step()) out.emplace_back(q->text(0));
  return out;
}

bool touches_observation(const Triple& t) {
  const std::string& p = t.predicate.str();
  if (p == terms::kTypeOf) {
    const Dcid* ref = t.object.as_ref();
    return ref && ref->str() == terms::kStatVarObservation;
  }
  return p == terms::kVariableMeasured || p == terms::kObservationAbout ||
         p == terms::kObservationDate || p == terms::kValue || p == terms::kUnit ||
         p == terms::kMeasurementMethod;
}

void refresh_observation(sql::Connection& conn, const Dcid& node) {
  {
    auto del = conn.query("DELETE FROM observations WHERE node = ?1");
    del->bind(1, node.str());
    del->step();
  }
  bool is_observation = false;
  std::optional<std::string> variable, entity, date, unit, mmethod;
  std::vector<std::pair<std::string, std::string>> values;  // (value, provenance)
  {
    auto q = conn.query(
        "SELECT predicate, object, provenance FROM triples WHERE subject = ?1 "
        "ORDER BY predicate, object, provenance");
    q->bind(1, node.str());
    while (q->step()) {
      const std::string p = q->text(0);
      const NodeValue o = NodeValue::from_key(q->text(1));
      auto first_ref = [&](std::optional<std::string>& slot) {
        if (!slot && o.as_ref()) slot = o.as_ref()->str();
      };
      if (p == terms::kTypeOf) {
        if (o.as_ref() && o.as_ref()->str() == terms::kStatVarObservation) is_observation = true;
      } else if (p == terms::kVariableMeasured) {
        first_ref(variable);
      } else if (p == terms::kObservationAbout) {
        first_ref(entity);
      } else if (p == terms::kObservationDate) {
        if (!date && o.as_date()) date = o.as_date()->str();
      } else if (p == terms::kUnit) {
        first_ref(unit);
      } else if (p == terms::kMeasurementMethod) {
        first_ref(mmethod);
      } else if (p == terms::kValue) {
        if (o.as_number()) values.emplace_back(o.as_number()->str(), q->text(2));
      }
    }
  }
  if (!is_observation || !variable || !entity || !date) return;
  auto ins = conn.query(
      "INSERT OR IGNORE INTO observations(node, variable, entity, date, value, unit, mmethod, "
      "provenance) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)");
  for (const auto& [value, prov] : values) {
    ins->bind(1, node.str());
    ins->bind(2, *variable);
    ins->bind(3, *entity);
    ins->bind(4, *date);
    ins->bind(5, value);
    ins->bind_optional(6, unit);
    ins->bind_optional(7, mmethod);
    ins->bind(8, prov);
    ins->step();
    (*ins).reset();
  }
}

// Shortest containedInPlace distance from every child to each ancestor, up
// to the depth cap. Breadth-first per child; a recursive CTE enumerates every
// path instead and blows up on dense or cyclic graphs.
void rebuild_containment(sql::Connection& conn) {
  conn.exec("DELETE FROM containment");
  std::unordered_map<std::string, std::vector<std::string>> parents;
  {
    auto q = conn.query(
        "SELECT DISTINCT subject, object_ref FROM triples "
        "WHERE predicate = 'containedInPlace' AND object_ref IS NOT NULL");
    while (q->step()) parents[q->text(0)].push_back(q->text(1));
  }
  auto ins = conn.query("INSERT INTO containment(ancestor, child, depth) VALUES (?1, ?2, ?3)");
  std::unordered_map<std::string_view, int> depth;
  std::vector<std::string_view> frontier, next;
  for (const auto& [child, _] : parents) {
    depth.clear();
    frontier.assign(1, child);
    depth.emplace(child, 0);
    for (int d = 1; d <= terms::kContainmentDepthCap && !frontier.empty(); ++d) {
      next.clear();
      for (std::string_view node : frontier) {
        auto it = parents.find(std::string(node));
        if (it == parents.end()) continue;
        for (const std::string& up : it->second) {
          if (!depth.emplace(up, d).second) continue;
          next.push_back(up);
          ins->bind(1, up);
          ins->bind(2, child);
          ins->bind(3, static_cast<std::int64_t>(d));
          ins->step();
          (*ins).reset();
        }
      }
      frontier.swap(next);
    }
  }
}

std::vector<ObservationRow> read_observation_rows(sql::Query& q) {
  std::vector<ObservationRow> out;
  while (q->step()) {
    ObservationRow r;
    r.node = Dcid(q->text(0));
    r.variable = Dcid(q->text(1));
    r.entity = Dcid(q->text(2));
    r.date = PartialDate::parse(q->text(3));
    r.value = Decimal::parse(q->text(4));
    if (auto u = q->optional_text(5)) r.unit = Dcid(*u);
    if (auto m = q->optional_text(6)) r.measurement_method = Dcid(*m);
    r.provenance = Dcid(q->text(7));
    r.provenance_import_date = PartialDate::parse(q->text(8));
    out.push_back(std::move(r));
  }
  return out;
}

constexpr std::string_view kObservationColumns =
    "SELECT o.node, o.variable, o.entity, o.date, o.value, o.unit, o.mmethod, o.provenance, "
    "p.import_date FROM observations o JOIN provenance p ON p.dcid = o.provenance ";

}  // namespace

class Store::Lease {
 public:
  Lease(const Store& store, std::unique_ptr<sql::Connection> conn)
      : store_(&store), conn_(std::move(conn)) {}
  Lease(Lease&& other) noexcept = default;
  ~Lease() {
    if (conn_) store_->release(std::move(conn_));
  }
  sql::Connection& operator*() { return *conn_; }
  sql::Connection* operator->() { return conn_.get(); }

 private:
  const Store* store_;
  std::unique_ptr<sql::Connection> conn_;
};

Store::Store(const std::string& path)
    : path_(path), max_connections_(path == ":memory:" || path.empty() ? 1 : 8) {
  auto conn = std::make_unique<sql::Connection>(path_);
  if (max_connections_ > 1) {
    conn->exec("PRAGMA journal_mode=WAL");
    conn->exec("PRAGMA synchronous=NORMAL");
  }
  conn->exec(kSchema);
  open_connections_ = 1;
  idle_.push_back(std::move(conn));
}

Store::~Store() = default;

Store::Lease Store::acquire() const {
  std::unique_lock lock(pool_mutex_);
  pool_cv_.wait(lock, [&] { return !idle_.empty() || open_connections_ < max_connections_; });
  if (!idle_.empty()) {
    auto conn = std::move(idle_.back());
    idle_.pop_back();
    return Lease(*this, std::move(conn));
  }
  ++open_connections_;
  lock.unlock();
  try {
    return Lease(*this, std::make_unique<sql::Connection>(path_));
  } catch (...) {
    std::lock_guard relock(pool_mutex_);
    --open_connections_;
    pool_cv_.notify_one();
    throw;
  }
}

void Store::release(std::unique_ptr<sql::Connection> conn) const {
  {
    std::lock_guard lock(pool_mutex_);
    idle_.push_back(std::move(conn));
  }
  pool_cv_.notify_one();
}

void Store::register_provenance(const Provenance& p) {
  std::unique_lock phase(phase_);
  auto conn = acquire();
  if (auto existing = [&]() -> std::optional<Provenance> {
        auto q = conn->query(
            "SELECT source_url, import_name, import_date FROM provenance WHERE dcid = ?1");
        q->bind(1, p.dcid.str());
        if (!q->step()) return std::nullopt;
        return Provenance{p.dcid, q->text(0), q->text(1), PartialDate::parse(q->text(2))};
      }()) {
    if (*existing == p) return;
    throw Error(ErrorCode::kProvenanceConflict,
                "provenance '" + p.dcid.str() + "' already registered with different fields");
  }
  auto ins = conn->query(
      "INSERT INTO provenance(dcid, source_url, import_name, import_date) VALUES (?1, ?2, ?3, ?4)");
  ins->bind(1, p.dcid.str());
  ins->bind(2, p.source_url);
  ins->bind(3, p.import_name);
  ins->bind(4, p.import_date.str());
  ins->step();
}

std::optional<Provenance> Store::provenance(const Dcid& dcid) const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query(
      "SELECT source_url, import_name, import_date FROM provenance WHERE dcid = ?1");
  q->bind(1, dcid.str());
  if (!q->step()) return std::nullopt;
  return Provenance{dcid, q->text(0), q->text(1), PartialDate::parse(q->text(2))};
}

std::vector<Provenance> Store::provenances() const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query(
      "SELECT dcid, source_url, import_name, import_date FROM provenance ORDER BY dcid");
  std::vector<Provenance> out;
  while (q->step()) {
    out.push_back(
        Provenance{Dcid(q->text(0)), q->text(1), q->text(2), PartialDate::parse(q->text(3))});
  }
  return out;
}

std::size_t Store::insert_triples(std::span<const Triple> triples, std::vector<bool>* fresh) {
  if (fresh) fresh->assign(triples.size(), false);
  if (triples.empty()) return 0;
  for (const Triple& t : triples) {
    if (t.subject.empty() || t.predicate.empty() || t.provenance.empty()) {
      throw Error(ErrorCode::kMalformedDcid, "triple with empty dcid");
    }
  }

  std::unique_lock phase(phase_);
  auto conn = acquire();
  sql::Transaction tx(*conn);

  {
    std::set<std::string> checked;
    auto q = conn->query("SELECT 1 FROM provenance WHERE dcid = ?1");
    for (const Triple& t : triples) {
      if (!checked.insert(t.provenance.str()).second) continue;
      q->bind(1, t.provenance.str());
      const bool known = q->step();
      (*q).reset();
      if (!known) {
        throw Error(ErrorCode::kUnknownProvenance,
                    "unknown provenance '" + t.provenance.str() + "'");
      }
    }
  }

  std::size_t added = 0;
  std::unordered_set<Dcid> observation_nodes;
  bool containment_changed = false;
  {
    auto ins = conn->query(
        "INSERT OR IGNORE INTO triples(subject, predicate, object, provenance, object_ref, "
        "object_fold) VALUES (?1, ?2, ?3, ?4, ?5, ?6)");
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const Triple& t = triples[i];
      ins->bind(1, t.subject.str());
      ins->bind(2, t.predicate.str());
      ins->bind(3, t.object.key());
      ins->bind(4, t.provenance.str());
      if (const Dcid* ref = t.object.as_ref()) {
        ins->bind(5, ref->str());
      } else {
        ins->bind_null(5);
      }
      ins->bind(6, fold_key(t.object));
      ins->step();
      (*ins).reset();
      if (conn->changes() > 0) {
        ++added;
        if (fresh) (*fresh)[i] = true;
        if (touches_observation(t)) observation_nodes.insert(t.subject);
        if (t.predicate.str() == terms::kContainedInPlace) containment_changed = true;
      }
    }
  }
  for (const Dcid& node : observation_nodes) refresh_observation(*conn, node);
  if (containment_changed) rebuild_containment(*conn);
  tx.commit();
  return added;
}

std::vector<Dcid> Store::arc_labels(const Dcid& node, Direction direction) const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query(direction == Direction::kOut
                           ? "SELECT DISTINCT predicate FROM triples WHERE subject = ?1 "
                             "ORDER BY predicate"
                           : "SELECT DISTINCT predicate FROM triples WHERE object_ref = ?1 "
                             "ORDER BY predicate");
  q->bind(1, node.str());
  return read_dcids(q);
}

std::vector<Triple> Store::neighbors(const Dcid& node, const Dcid& label, Direction direction,
                                     const std::optional<Dcid>& provenance_filter) const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  std::string sql = "SELECT subject, predicate, object, provenance FROM triples WHERE ";
  sql += direction == Direction::kOut ? "subject = ?1" : "object_ref = ?1";
  sql += " AND predicate = ?2";
  if (provenance_filter) sql += " AND provenance = ?3";
  sql += direction == Direction::kOut ? " ORDER BY object, provenance"
                                      : " ORDER BY subject, provenance";
  auto q = conn->query(sql);
  q->bind(1, node.str());
  q->bind(2, label.str());
  if (provenance_filter) q->bind(3, provenance_filter->str());
  std::vector<Triple> out;
  while (q->step()) out.push_back(read_triple(*q));
  return out;
}

std::vector<Triple> Store::node_triples(const Dcid& node, Direction direction) const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query(
      direction == Direction::kOut
          ? "SELECT subject, predicate, object, provenance FROM triples WHERE subject = ?1 "
            "ORDER BY predicate, object, provenance"
          : "SELECT subject, predicate, object, provenance FROM triples WHERE object_ref = ?1 "
            "ORDER BY predicate, subject, provenance");
  q->bind(1, node.str());
  std::vector<Triple> out;
  while (q->step()) out.push_back(read_triple(*q));
  return out;
}

void Store::for_each_triple(const std::function<void(const Triple&)>& fn) const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query(
      "SELECT subject, predicate, object, provenance FROM triples "
      "ORDER BY subject, predicate, object, provenance");
  while (q->step()) fn(read_triple(*q));
}

std::vector<Triple> Store::all_triples() const {
  std::vector<Triple> out;
  for_each_triple([&](const Triple& t) { out.push_back(t); });
  return out;
}

std::size_t Store::triple_count() const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query("SELECT COUNT(*) FROM triples");
  q->step();
  return static_cast<std::size_t>(q->integer(0));
}

std::vector<Dcid> Store::subjects_with(const Dcid& predicate, const NodeValue& value,
                                       bool fold_case) const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  const bool folded = fold_case && value.kind() == ValueKind::kText;
  auto q = conn->query(folded ? "SELECT DISTINCT subject FROM triples WHERE predicate = ?1 "
                                "AND object_fold = ?2 ORDER BY subject"
                              : "SELECT DISTINCT subject FROM triples WHERE predicate = ?1 "
                                "AND object_fold = ?2 AND object = ?3 ORDER BY subject");
  q->bind(1, predicate.str());
  q->bind(2, fold_key(value));
  if (!folded) q->bind(3, value.key());
  return read_dcids(q);
}

std::vector<Dcid> Store::subjects_with_text_or_ref(const Dcid& predicate, const std::string& text,
                                                   bool fold_case) const {
  std::vector<Dcid> out = subjects_with(predicate, NodeValue(Text{text}), fold_case);
  if (Dcid::is_valid(text)) {
    auto refs = subjects_with(predicate, NodeValue(Dcid(text)), false);
    std::vector<Dcid> merged;
    std::set_union(out.begin(), out.end(), refs.begin(), refs.end(), std::back_inserter(merged));
    out = std::move(merged);
  }
  return out;
}

std::vector<ObservationRow> Store::observations(const Dcid& variable, const Dcid& entity) const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query(std::string(kObservationColumns) +
                       "WHERE o.variable = ?1 AND o.entity = ?2 "
                       "ORDER BY o.date, o.provenance, o.value, o.node");
  q->bind(1, variable.str());
  q->bind(2, entity.str());
  return read_observation_rows(q);
}

std::vector<ObservationRow> Store::observations_for_entities(
    const Dcid& variable, std::span<const Dcid> entities) const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query(std::string(kObservationColumns) +
                       "WHERE o.variable = ?1 AND o.entity = ?2 "
                       "ORDER BY o.date, o.provenance, o.value, o.node");
  std::vector<ObservationRow> out;
  for (const Dcid& e : entities) {
    q->bind(1, variable.str());
    q->bind(2, e.str());
    auto rows = read_observation_rows(q);
    (*q).reset();
    std::move(rows.begin(), rows.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<Dcid> Store::variables_for(const Dcid& entity) const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query(
      "SELECT DISTINCT variable FROM observations WHERE entity = ?1 ORDER BY variable");
  q->bind(1, entity.str());
  return read_dcids(q);
}

std::vector<Dcid> Store::observed_variables() const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query("SELECT DISTINCT variable FROM observations ORDER BY variable");
  return read_dcids(q);
}

std::vector<Dcid> Store::observed_entities() const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query("SELECT DISTINCT entity FROM observations ORDER BY entity");
  return read_dcids(q);
}

std::vector<Dcid> Store::contained_children(const Dcid& parent, const Dcid& child_type) const {
  std::shared_lock phase(phase_);
  auto conn = acquire();
  auto q = conn->query(
      "SELECT c.child FROM containment c WHERE c.ancestor = ?1 AND EXISTS ("
      " SELECT 1 FROM triples t WHERE t.subject = c.child AND t.predicate = 'typeOf'"
      " AND t.object = ?2) ORDER BY c.child");
  q->bind(1, parent.str());
  q->bind(2, "ref:" + child_type.str());
  return read_dcids(q);
}

void Store::rebuild_derived_indexes() {
  std::unique_lock phase(phase_);
  auto conn = acquire();
  sql::Transaction tx(*conn);
  conn->exec("DELETE FROM observations");
  std::vector<Dcid> nodes;
  {
    auto q = conn->query(
        "SELECT DISTINCT subject FROM triples WHERE predicate = 'typeOf' "
        "AND object = 'ref:StatVarObservation'");
    nodes = read_dcids(q);
  }
  for (const Dcid& node : nodes) refresh_observation(*conn, node);
  rebuild_containment(*conn);
  tx.commit();
}

}  // namespace dc::kg
