#include <doctest.h>

#include <algorithm>
#include <memory>

#include "dc/error.hpp"
#include "dc/ingest/dcnf.hpp"
#include "dc/schema/statvar.hpp"
#include "dc/schema/validate.hpp"
#include "dc/schema/vocabulary.hpp"
#include "test_support.hpp"

using namespace dc;
using kg::Dcid;
using kg::NodeValue;
using schema::ViolationKind;

namespace {

// Core vocabulary plus the given DCNF body under prov/t.
std::unique_ptr<kg::Store> store_with(const std::string& body) {
  auto s = std::make_unique<kg::Store>(":memory:");
  schema::ensure_core_vocabulary(*s);
  const auto parsed = ingest::parse_node_file(
      "@provenance prov/t\n@importName t\n@importDate 2024-01-01\n\n" + body);
  REQUIRE(parsed.errors.empty());
  for (const auto& p : parsed.provenances) s->register_provenance(p);
  s->insert_triples(parsed.triples);
  return s;
}

std::vector<ViolationKind> kinds(const std::vector<schema::Violation>& vs) {
  std::vector<ViolationKind> out;
  for (const auto& v : vs) out.push_back(v.kind);
  return out;
}

}  // namespace

TEST_CASE("core vocabulary is stable and idempotent") {
  kg::Store s(":memory:");
  const std::size_t n = schema::ensure_core_vocabulary(s);
  CHECK(n == schema::load_core_vocabulary().size());
  CHECK(n > 100);
  CHECK(schema::ensure_core_vocabulary(s) == 0);
  CHECK(&schema::load_core_vocabulary() == &schema::load_core_vocabulary());
  CHECK(schema::core_vocabulary_provenance().dcid.str() == "prov/core-vocab");
  CHECK(schema::validate(s).empty());
}

TEST_CASE("superclasses follow subClassOf") {
  kg::Store s(":memory:");
  schema::ensure_core_vocabulary(s);
  const auto up = schema::superclasses(Dcid("Country"), s);
  CHECK(std::find(up.begin(), up.end(), Dcid("Country")) != up.end());
  CHECK(std::find(up.begin(), up.end(), Dcid("Place")) != up.end());
  CHECK(std::find(up.begin(), up.end(), Dcid("Person")) == up.end());
}

TEST_CASE("fixtures import without violations") {
  kg::Store s(":memory:");
  const auto report = testing::import_fixtures(s, {"f1.dcnf", "f2.dcnf", "f3.dcnf"});
  CHECK(report.violations.empty());
  CHECK(schema::validate(s).empty());
}

TEST_CASE("range violations") {
  SUBCASE("reference where a literal is expected") {
    auto s = store_with("dcid: x\ntypeOf: dcid:Place\nname: dcid:Georgia\n");
    CHECK(kinds(schema::validate(*s)) == std::vector{ViolationKind::kRangeViolation});
  }
  SUBCASE("wrong literal kind") {
    auto s = store_with("dcid: x\ntypeOf: dcid:Place\nname: 42\n");
    const auto vs = schema::validate(*s);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].kind == ViolationKind::kRangeViolation);
    CHECK(vs[0].subject == Dcid("x"));
    CHECK(vs[0].predicate == Dcid("name"));
  }
  SUBCASE("typed target outside the range class") {
    auto s = store_with("dcid: p\ntypeOf: dcid:Person\n\n"
                        "dcid: x\ntypeOf: dcid:City\ncontainedInPlace: dcid:p\n");
    CHECK(kinds(schema::validate(*s)) == std::vector{ViolationKind::kRangeViolation});
  }
  SUBCASE("untyped target is open world") {
    auto s = store_with("dcid: x\ntypeOf: dcid:City\ncontainedInPlace: dcid:somewhere\n");
    CHECK(schema::validate(*s).empty());
  }
}

TEST_CASE("domain violation") {
  auto s = store_with("dcid: x\ntypeOf: dcid:City\ngender: dcid:Female\n");
  const auto vs = schema::validate(*s);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].kind == ViolationKind::kDomainViolation);
  CHECK(vs[0].predicate == Dcid("gender"));
}

TEST_CASE("undeclared property is a warning") {
  auto s = store_with("dcid: x\ntypeOf: dcid:City\nmadeUpProperty: \"v\"\n");
  const auto vs = schema::validate(*s);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].kind == ViolationKind::kUndeclaredProperty);
  CHECK(schema::is_warning(vs[0].kind));
  CHECK_FALSE(schema::is_warning(ViolationKind::kRangeViolation));
}

TEST_CASE("statistical variable checks") {
  SUBCASE("incomplete") {
    auto s = store_with("dcid: v\ntypeOf: dcid:StatisticalVariable\npopulationType: dcid:Person\n");
    CHECK(kinds(schema::validate(*s)) == std::vector{ViolationKind::kIncompleteStatVar});
  }
  SUBCASE("constraint without value") {
    auto s = store_with(
        "dcid: v\ntypeOf: dcid:StatisticalVariable\npopulationType: dcid:Person\n"
        "measuredProperty: dcid:count\nstatType: dcid:count\nconstraintProperties: dcid:gender\n");
    CHECK(kinds(schema::validate(*s)) == std::vector{ViolationKind::kIncompleteStatVar});
  }
  SUBCASE("unknown stat type") {
    auto s = store_with("dcid: v\ntypeOf: dcid:StatisticalVariable\npopulationType: dcid:Person\n"
                        "measuredProperty: dcid:count\nstatType: dcid:mode\n");
    CHECK(kinds(schema::validate(*s)) ==
          std::vector{ViolationKind::kUnknownStatType});
  }
  SUBCASE("duplicate definitions") {
    const std::string def = "typeOf: dcid:StatisticalVariable\npopulationType: dcid:Person\n"
                            "measuredProperty: dcid:count\nstatType: dcid:count\n"
                            "constraintProperties: dcid:gender\ngender: dcid:Female\n";
    auto s = store_with("dcid: v1\n" + def + "\ndcid: v2\n" + def);
    const auto vs = schema::validate(*s);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].kind == ViolationKind::kDuplicateStatVar);
    CHECK(vs[0].subject == Dcid("v2"));
  }
  SUBCASE("constraint arcs are checked against the population type") {
    auto s = store_with("dcid: v\ntypeOf: dcid:StatisticalVariable\npopulationType: dcid:Household\n"
                        "measuredProperty: dcid:count\nstatType: dcid:count\n"
                        "constraintProperties: dcid:gender\ngender: dcid:Female\n");
    CHECK(kinds(schema::validate(*s)) == std::vector{ViolationKind::kDomainViolation});
  }
}

TEST_CASE("containment cycle reported once") {
  auto s = store_with("dcid: a\ntypeOf: dcid:City\ncontainedInPlace: dcid:b\n\n"
                      "dcid: b\ntypeOf: dcid:City\ncontainedInPlace: dcid:c\n\n"
                      "dcid: c\ntypeOf: dcid:City\ncontainedInPlace: dcid:a\n");
  const auto vs = schema::validate(*s);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].kind == ViolationKind::kContainmentCycle);
  CHECK(vs[0].subject == Dcid("a"));
  CHECK(vs[0].detail == "containedInPlace cycle: a b c");
}

TEST_CASE("validation never mutates") {
  auto s = store_with("dcid: x\ntypeOf: dcid:City\nname: 42\n");
  const auto before = s->all_triples();
  schema::validate(*s);
  CHECK(s->all_triples() == before);
}

TEST_CASE("decompose the fixture variables") {
  kg::Store s(":memory:");
  testing::import_fixtures(s, {"f1.dcnf"});
  const auto d = schema::decompose(Dcid("dc/var/HispanicFemalePop"), s);
  CHECK(d.population_type == Dcid("Person"));
  CHECK(d.measured_property == Dcid("count"));
  CHECK(d.stat_type == Dcid("count"));
  CHECK(d.constraints == std::map<Dcid, NodeValue>{{Dcid("gender"), NodeValue::ref("Female")},
                                                   {Dcid("race"), NodeValue::ref("Hispanic")}});
  CHECK_FALSE(d.unit);

  const auto income = schema::decompose(Dcid("dc/var/MedianIncome"), s);
  CHECK(income.stat_type == Dcid("median"));
  CHECK(income.unit == Dcid("USDollar"));

  CHECK_THROWS_AS(schema::decompose(Dcid("country/GEO"), s), Error);
  try {
    schema::decompose(Dcid("geoId/06"), s);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotAStatVar);
  }
}

TEST_CASE("decompose ignores the dcid text") {
  auto s = store_with("dcid: dc/var/Count_Person_Male\ntypeOf: dcid:StatisticalVariable\n"
                      "populationType: dcid:Household\nmeasuredProperty: dcid:income\n"
                      "statType: dcid:mean\n");
  const auto d = schema::decompose(Dcid("dc/var/Count_Person_Male"), *s);
  CHECK(d.population_type == Dcid("Household"));
  CHECK(d.constraints.empty());
  auto missing = store_with("dcid: v\ntypeOf: dcid:StatisticalVariable\npopulationType: dcid:Person\n");
  try {
    schema::decompose(Dcid("v"), *missing);
    FAIL("expected MissingRequiredProperty");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingRequiredProperty);
  }
}

TEST_CASE("compose and decompose round trip") {
  kg::Store s(":memory:");
  testing::import_fixtures(s, {"f1.dcnf"});
  for (const char* v : {"dc/var/TotalPop", "dc/var/HispanicFemalePop", "dc/var/MedianIncome"}) {
    CAPTURE(v);
    const auto d = schema::decompose(Dcid(v), s);
    const auto triples = schema::compose(d, Dcid(v), Dcid("prov/fixture-vars"), s);
    CHECK(testing::sorted_unique(triples) == testing::sorted_unique(schema::defining_triples(Dcid(v), s)));

    kg::Store other(":memory:");
    schema::ensure_core_vocabulary(other);
    other.register_provenance(*s.provenance(Dcid("prov/fixture-vars")));
    other.insert_triples(triples);
    CHECK(schema::decompose(Dcid(v), other) == d);
  }
}

TEST_CASE("compose rejects foreign constraint properties") {
  kg::Store s(":memory:");
  schema::ensure_core_vocabulary(s);
  schema::StatVarDecomposition d{Dcid("Household"), Dcid("count"), Dcid("count"),
                                 {{Dcid("gender"), NodeValue::ref("Female")}}, std::nullopt};
  for (const char* key : {"gender", "notAProperty"}) {
    CAPTURE(key);
    d.constraints = {{Dcid(key), NodeValue::ref("Female")}};
    try {
      schema::compose(d, Dcid("v"), Dcid("prov/t"), s);
      FAIL("expected InvalidConstraintProperty");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidConstraintProperty);
    }
  }
  d.population_type = Dcid("Person");
  d.constraints = {{Dcid("gender"), NodeValue::ref("Female")}};
  CHECK(schema::compose(d, Dcid("v"), Dcid("prov/t"), s).size() == 6);
}
