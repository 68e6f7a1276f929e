#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <thread>

#include "dc/error.hpp"
#include "dc/kg/store.hpp"
#include "dc/kg/terms.hpp"
#include "test_support.hpp"

using namespace dc;
using kg::Dcid;
using kg::Direction;
using kg::NodeValue;
using kg::Triple;

namespace {

const kg::Provenance kProv{Dcid("prov/a"), "https://a.example", "A", kg::PartialDate::parse("2024-01-01")};
const kg::Provenance kProvB{Dcid("prov/b"), "https://b.example", "B", kg::PartialDate::parse("2023-01-01")};

Triple tr(const char* s, const char* p, NodeValue o, const char* prov = "prov/a") {
  return {Dcid(s), Dcid(p), std::move(o), Dcid(prov)};
}

std::unique_ptr<kg::Store> fresh_store() {
  auto s = std::make_unique<kg::Store>(":memory:");
  s->register_provenance(kProv);
  s->register_provenance(kProvB);
  return s;
}

}  // namespace

TEST_CASE("empty store is total") {
  kg::Store s(":memory:");
  CHECK(s.triple_count() == 0);
  CHECK(s.arc_labels(Dcid("nothing/here"), Direction::kOut).empty());
  CHECK(s.arc_labels(Dcid("nothing/here"), Direction::kIn).empty());
  CHECK(s.neighbors(Dcid("x"), Dcid("y"), Direction::kIn).empty());
  CHECK(s.node_triples(Dcid("x"), Direction::kOut).empty());
  CHECK(s.observations(Dcid("v"), Dcid("e")).empty());
}

TEST_CASE("insert is idempotent and reports fresh triples") {
  auto store = fresh_store();
  kg::Store& s = *store;
  std::vector<Triple> batch = {tr("country/GEO", "typeOf", NodeValue::ref("Country")),
                               tr("country/GEO", "name", NodeValue::text("Georgia")),
                               tr("country/GEO", "name", NodeValue::text("Georgia"))};
  std::vector<bool> fresh;
  CHECK(s.insert_triples(batch, &fresh) == 2);
  CHECK(fresh == std::vector<bool>{true, true, false});
  CHECK(s.insert_triples(batch, &fresh) == 0);
  CHECK(fresh == std::vector<bool>{false, false, false});
  CHECK(s.triple_count() == 2);
  // Same statement from another source is a distinct triple.
  CHECK(s.insert_triples(std::vector{tr("country/GEO", "name", NodeValue::text("Georgia"), "prov/b")}) == 1);
  CHECK(s.triple_count() == 3);
}

TEST_CASE("insert is atomic") {
  auto store = fresh_store();
  kg::Store& s = *store;
  std::vector<Triple> batch = {tr("a", "p", NodeValue::text("x")),
                               tr("b", "p", NodeValue::text("y"), "prov/unregistered")};
  CHECK_THROWS_WITH_AS(s.insert_triples(batch), doctest::Contains("unknown provenance"), Error);
  CHECK(s.triple_count() == 0);
}

TEST_CASE("provenance records") {
  auto store = fresh_store();
  kg::Store& s = *store;
  s.register_provenance(kProv);  // identical: fine
  CHECK(s.provenance(Dcid("prov/a")) == kProv);
  CHECK_FALSE(s.provenance(Dcid("prov/none")).has_value());
  kg::Provenance changed = kProv;
  changed.import_name = "other";
  try {
    s.register_provenance(changed);
    FAIL("expected a conflict");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kProvenanceConflict);
  }
  CHECK(s.provenances().size() == 2);
}

TEST_CASE("navigation results and order") {
  auto store = fresh_store();
  kg::Store& s = *store;
  s.insert_triples(std::vector{
      tr("geoId/13", "name", NodeValue::text("Georgia")),
      tr("geoId/13", "typeOf", NodeValue::ref("AdministrativeArea1")),
      tr("geoId/13", "containedInPlace", NodeValue::ref("country/USA")),
      tr("geoId/13", "containedInPlace", NodeValue::ref("country/USA"), "prov/b"),
      tr("geoId/06", "containedInPlace", NodeValue::ref("country/USA")),
      tr("geoId/06", "area", NodeValue::number("423970")),
      tr("geoId/06", "area", NodeValue::number("1e6")),
  });
  CHECK(s.arc_labels(Dcid("geoId/13"), Direction::kOut) ==
        std::vector<Dcid>{Dcid("containedInPlace"), Dcid("name"), Dcid("typeOf")});
  CHECK(s.arc_labels(Dcid("country/USA"), Direction::kIn) == std::vector<Dcid>{Dcid("containedInPlace")});

  auto in = s.neighbors(Dcid("country/USA"), Dcid("containedInPlace"), Direction::kIn);
  REQUIRE(in.size() == 3);
  CHECK(in[0].subject.str() == "geoId/06");
  CHECK(in[1].subject.str() == "geoId/13");
  CHECK(in[1].provenance.str() == "prov/a");
  CHECK(in[2].provenance.str() == "prov/b");

  auto filtered = s.neighbors(Dcid("country/USA"), Dcid("containedInPlace"), Direction::kIn, Dcid("prov/b"));
  REQUIRE(filtered.size() == 1);
  CHECK(filtered[0].subject.str() == "geoId/13");

  // Out-direction objects order by their serialized key.
  auto areas = s.neighbors(Dcid("geoId/06"), Dcid("area"), Direction::kOut);
  REQUIRE(areas.size() == 2);
  CHECK(areas[0].object.key() == "number:1e6");
  CHECK(areas[1].object.key() == "number:423970");

  CHECK(s.node_triples(Dcid("geoId/13"), Direction::kOut).size() == 4);
}

TEST_CASE("value lookups for resolution") {
  auto store = fresh_store();
  kg::Store& s = *store;
  s.insert_triples(std::vector{tr("a", "name", NodeValue::text("Georgia")),
                               tr("b", "name", NodeValue::text("GEORGIA")),
                               tr("c", "typeOf", NodeValue::ref("Georgia"))});
  CHECK(s.subjects_with(Dcid("name"), NodeValue::text("georgia"), true) ==
        std::vector<Dcid>{Dcid("a"), Dcid("b")});
  CHECK(s.subjects_with(Dcid("name"), NodeValue::text("Georgia"), false) == std::vector<Dcid>{Dcid("a")});
  CHECK(s.subjects_with_text_or_ref(Dcid("typeOf"), "Georgia", false) == std::vector<Dcid>{Dcid("c")});
}

TEST_CASE("store persists across reopen") {
  const auto dir = std::filesystem::temp_directory_path() / "dc_store_reopen";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "kg.db").string();
  {
    kg::Store s(path);
    s.register_provenance(kProv);
    s.insert_triples(std::vector{tr("x", "p", NodeValue::date("2019"))});
  }
  kg::Store again(path);
  CHECK(again.triple_count() == 1);
  CHECK(again.provenance(Dcid("prov/a")) == kProv);
  CHECK(again.node_triples(Dcid("x"), Direction::kOut)[0].object == NodeValue::date("2019"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("readers see whole batches only") {
  const auto dir = std::filesystem::temp_directory_path() / "dc_store_phases";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  kg::Store s((dir / "kg.db").string());
  s.register_provenance(kProv);
  constexpr int kBatch = 50;
  std::atomic<bool> done{false};
  std::atomic<int> torn{0};
  std::atomic<int> reads{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 3; ++r) {
    readers.emplace_back([&] {
      while (!done) {
        const auto n = s.node_triples(Dcid("hub"), Direction::kOut).size();
        if (n % kBatch != 0) ++torn;
        ++reads;
      }
    });
  }
  for (int b = 0; b < 20; ++b) {
    std::vector<Triple> batch;
    for (int i = 0; i < kBatch; ++i)
      batch.push_back(tr("hub", "p", NodeValue::number(std::to_string(b * kBatch + i))));
    s.insert_triples(batch);
  }
  done = true;
  for (auto& t : readers) t.join();
  CHECK(torn == 0);
  CHECK(reads > 0);
  CHECK(s.triple_count() == 20 * kBatch);
  std::filesystem::remove_all(dir);
}

TEST_CASE("containment closure respects the depth cap and cycles") {
  auto store = fresh_store();
  kg::Store& s = *store;
  std::vector<Triple> chain;
  // c0 <- c1 <- ... <- c10, each typed T.
  for (int i = 1; i <= 10; ++i) {
    const std::string child = "c" + std::to_string(i);
    const std::string parent = "c" + std::to_string(i - 1);
    chain.push_back({Dcid(child), Dcid("containedInPlace"), NodeValue::ref(parent), Dcid("prov/a")});
    chain.push_back({Dcid(child), Dcid("typeOf"), NodeValue::ref("T"), Dcid("prov/a")});
  }
  s.insert_triples(chain);
  const auto under_root = s.contained_children(Dcid("c0"), Dcid("T"));
  CHECK(under_root.size() == static_cast<std::size_t>(terms::kContainmentDepthCap));
  CHECK(s.contained_children(Dcid("c9"), Dcid("T")) == std::vector<Dcid>{Dcid("c10")});
  CHECK(s.contained_children(Dcid("c0"), Dcid("Other")).empty());

  // A cycle terminates; a node is never its own child.
  s.insert_triples(std::vector{tr("x", "containedInPlace", NodeValue::ref("y")),
                               tr("y", "containedInPlace", NodeValue::ref("x")),
                               tr("x", "typeOf", NodeValue::ref("T")), tr("y", "typeOf", NodeValue::ref("T"))});
  CHECK(s.contained_children(Dcid("x"), Dcid("T")) == std::vector<Dcid>{Dcid("y")});
  CHECK(s.contained_children(Dcid("y"), Dcid("T")) == std::vector<Dcid>{Dcid("x")});
}

TEST_CASE("observation index follows inserts and rebuilds") {
  auto store = fresh_store();
  kg::Store& s = *store;
  auto obs = [](const char* node, const char* value, const char* date) {
    return std::vector<Triple>{
        tr(node, "typeOf", NodeValue::ref("StatVarObservation")),
        tr(node, "variableMeasured", NodeValue::ref("v")),
        tr(node, "observationAbout", NodeValue::ref("e")),
        tr(node, "observationDate", NodeValue::date(date)),
        tr(node, "value", NodeValue::number(value)),
    };
  };
  // Split over two batches: the index must still pick the node up.
  auto first = obs("o1", "10", "2019");
  s.insert_triples(std::span(first).first(3));
  CHECK(s.observations(Dcid("v"), Dcid("e")).empty());
  s.insert_triples(std::span(first).subspan(3));
  REQUIRE(s.observations(Dcid("v"), Dcid("e")).size() == 1);
  s.insert_triples(obs("o2", "11", "2020"));
  CHECK(s.observations(Dcid("v"), Dcid("e")).size() == 2);
  CHECK(s.variables_for(Dcid("e")) == std::vector<Dcid>{Dcid("v")});
  CHECK(s.observed_variables() == std::vector<Dcid>{Dcid("v")});
  s.rebuild_derived_indexes();
  const auto rows = s.observations(Dcid("v"), Dcid("e"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].provenance_import_date == kProv.import_date);
}

TEST_CASE("random graphs agree with the linear-scan oracle") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 10; ++round) {
    const auto g = testing::random_graph(rng, 50 + round * 60);
    kg::Store s(":memory:");
    testing::load(s, g);
    const auto unique = testing::sorted_unique(g.triples);
    CHECK(s.triple_count() == unique.size());
    CHECK(s.all_triples() == unique);
    for (const Dcid& node : g.nodes) {
      for (Direction d : {Direction::kOut, Direction::kIn}) {
        CHECK(s.arc_labels(node, d) == testing::oracle::arc_labels(unique, node, d));
        CHECK(s.node_triples(node, d) == testing::oracle::neighbors(unique, node, std::nullopt, d));
        for (const Dcid& p : g.predicates)
          CHECK(s.neighbors(node, p, d) == testing::oracle::neighbors(unique, node, p, d));
      }
    }
  }
}

TEST_CASE("containment closure on random graphs matches hop-by-hop expansion") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 6; ++round) {
    const auto g = testing::random_graph(rng, 100 + round * 300);
    kg::Store s(":memory:");
    testing::load(s, g);
    // Places reachable from each node in 1..cap hops, scanning every triple per hop.
    std::map<Dcid, std::set<Dcid>> above;
    for (const Dcid& c : g.nodes) {
      std::set<Dcid> level{c}, seen;
      for (int hop = 0; hop < terms::kContainmentDepthCap; ++hop) {
        std::set<Dcid> next;
        for (const Triple& t : g.triples)
          if (t.predicate.str() == "containedInPlace" && level.count(t.subject)) next.insert(*t.object.as_ref());
        seen.insert(next.begin(), next.end());
        level = std::move(next);
      }
      seen.erase(c);
      above[c] = std::move(seen);
    }
    for (const Dcid& parent : g.nodes) {
      for (const char* type : {"C0", "Country"}) {
        std::vector<Dcid> want;
        for (const Dcid& c : g.nodes) {
          if (!above[c].count(parent)) continue;
          const bool typed = std::any_of(g.triples.begin(), g.triples.end(), [&](const Triple& t) {
            return t.subject == c && t.predicate.str() == "typeOf" && *t.object.as_ref() == Dcid(type);
          });
          if (typed) want.push_back(c);
        }
        std::sort(want.begin(), want.end());
        CHECK(s.contained_children(parent, Dcid(type)) == want);
      }
    }
  }
}
