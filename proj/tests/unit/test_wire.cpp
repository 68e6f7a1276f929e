#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>

#include "dc/api/server.hpp"
#include "dc/api/wire.hpp"
#include "test_support.hpp"

using namespace dc;
using api::Json;
using kg::Dcid;
using kg::NodeValue;

namespace {

int expected_status(const std::string& name) {
  if (name == "error_not_found") return 404;
  if (name.starts_with("error_")) return 400;
  return 200;
}

std::string random_decimal(std::mt19937_64& rng) {
  static const char* const kPool[] = {"0", "1", "-1", "4080000", "0.1", "3.14159", "1e-7", "1e6",
                                      "-2.5e-12", "9007199254740993", "12345678901234567890.5",
                                      "0.30000000000000004", "1e400", "99999999999999999999999"};
  return kPool[std::uniform_int_distribution<std::size_t>(0, std::size(kPool) - 1)(rng)];
}

}  // namespace

TEST_CASE("encoding is canonical") {
  Json j = Json::parse(R"({ "b": [1, 2.50, "zürich"], "a": {"y": null, "x": true} })");
  CHECK(api::encode(j) == "{\"a\":{\"x\":true,\"y\":null},\"b\":[1,2.5,\"z\xC3\xBCrich\"]}");
  CHECK(api::encode(Json(1.0)) == "1");
  CHECK(api::encode(Json(0.1)) == "0.1");
  CHECK(api::encode(Json(1e-7)) == "1e-7");
  CHECK(api::encode(Json("tab\there \"q\"")) == "\"tab\\there \\\"q\\\"\"");
  CHECK(api::encode(api::decode(api::encode(j))) == api::encode(j));
}

TEST_CASE("decimal values keep exactness") {
  CHECK(api::encode(api::to_json(kg::Decimal::parse("4080000"))) == "4080000");
  CHECK(api::encode(api::to_json(kg::Decimal::parse("8.7"))) == "8.7");
  CHECK(api::encode(api::to_json(kg::Decimal::parse("9007199254740993"))) == "9007199254740993");
  CHECK(api::encode(api::to_json(kg::Decimal::parse("12345678901234567890.5"))) ==
        "\"12345678901234567890.5\"");
  CHECK(api::from_json<kg::Decimal>(Json("1e400")).str() == "1e400");
  CHECK(api::from_json<kg::Decimal>(Json(8.7)).str() == "8.7");
  CHECK_THROWS_AS(api::from_json<kg::Decimal>(Json("many")), Error);
}

TEST_CASE("node values are tagged") {
  CHECK(api::encode(api::to_json(NodeValue::ref("Country"))) == R"({"ref":"Country"})");
  CHECK(api::encode(api::to_json(NodeValue::text("Georgia"))) == R"({"text":"Georgia"})");
  CHECK(api::encode(api::to_json(NodeValue::date("2019-06"))) == R"({"date":"2019-06"})");
  CHECK(api::encode(api::to_json(NodeValue(kg::Quantity{kg::Decimal::parse("10"), Dcid("Kilogram")}))) ==
        R"({"quantity":{"unit":"Kilogram","value":10}})");
  CHECK(api::encode(api::to_json(NodeValue(
            kg::QuantityRange{std::nullopt, kg::Decimal::parse("5"), Dcid("Year")}))) ==
        R"({"quantityRange":{"high":5,"unit":"Year"}})");
}

TEST_CASE("decode reports the failing offset") {
  try {
    api::decode(R"({"a": [1, 2,, 3]})");
    FAIL("expected DecodeError");
  } catch (const api::DecodeError& e) {
    CHECK(e.code() == ErrorCode::kDecode);
    CHECK(e.offset() == 12);  // the second comma
  }
  CHECK_THROWS_AS(api::decode(""), api::DecodeError);
  CHECK_THROWS_AS(api::decode("{} extra"), api::DecodeError);
  CHECK_THROWS_AS(api::decode("\"\xFF\""), api::DecodeError);
  // Structural mismatch is a decode error, not a crash.
  CHECK_THROWS_AS(api::from_json<kg::Triple>(Json::object()), Error);
  CHECK_THROWS_AS(api::from_json<kg::Triple>(
                      api::decode(R"({"subject":"a b","predicate":"p","object":{"ref":"x"},"provenance":"q"})")),
                  Error);
}

TEST_CASE("error bodies") {
  CHECK(api::encode(api::error_body("InvalidRange", "start after end")) ==
        R"({"error":{"code":"InvalidRange","message":"start after end"}})");
}

TEST_CASE("percent encoding") {
  CHECK(api::percent_encode("country/GEO") == "country%2FGEO");
  CHECK(api::percent_encode("a b&c=d") == "a%20b%26c%3Dd");
  CHECK(api::percent_encode("Z\xC3\xBCrich-_.~") == "Z%C3%BCrich-_.~");
}

TEST_CASE("random payloads round trip") {
  std::mt19937_64 rng(7);
  const auto g = testing::random_graph(rng, 2000);
  for (const auto& t : g.triples) {
    const auto back = api::from_json<kg::Triple>(api::decode(api::encode(api::to_json(t))));
    CHECK(back == t);
  }
  for (int i = 0; i < 300; ++i) {
    stat::Observation o{Dcid("dc/var/X"), g.nodes[i % g.nodes.size()],
                        kg::PartialDate::parse(i % 2 ? "2020" : "2021-03-04"),
                        kg::Decimal::parse(random_decimal(rng)),
                        i % 3 ? std::optional<Dcid>(Dcid("USDollar")) : std::nullopt,
                        i % 5 ? std::nullopt : std::optional<Dcid>(Dcid("CensusACS5yrSurvey")),
                        Dcid("prov/r0")};
    federation::PointResult r{o, i % 4, {}};
    if (i % 7 == 0) r.warnings.push_back({"Timeout", "http://b", "slow"});
    CHECK(api::from_json<federation::PointResult>(api::decode(api::encode(api::to_json(r)))) == r);
  }
  federation::CollectionResult c;
  c.children = {Dcid("a"), Dcid("b")};
  c.rows.push_back({Dcid("a"), {Dcid("v"), Dcid("a"), kg::PartialDate::parse("2020"),
                                kg::Decimal::parse("1e400"), std::nullopt, std::nullopt, Dcid("p")}});
  c.origins = {2};
  CHECK(api::from_json<federation::CollectionResult>(api::decode(api::encode(api::to_json(c)))) == c);

  ingest::ImportReport rep;
  rep.triples_added = 3;
  rep.rows_skipped = {{4, "Unresolved: x"}};
  rep.parse_errors = {{"f.dcnf", {9, "bad"}}};
  rep.violations = {{schema::ViolationKind::kRangeViolation, Dcid("s"), Dcid("p"), "d"}};
  CHECK(api::from_json<ingest::ImportReport>(api::decode(api::encode(api::to_json(rep)))) == rep);
}

TEST_CASE("responses match the frozen goldens") {
  auto store = testing::golden_store();
  api::Service service(*store, testing::golden_config(), {});
  const bool update = std::getenv("DC_UPDATE_GOLDEN") != nullptr;
  for (const auto& c : testing::golden_cases()) {
    CAPTURE(c.name);
    const api::Response r = service.handle(c.request);
    CHECK(r.status == expected_status(c.name));
    if (update) {
      std::ofstream(testing::golden_path(c.name), std::ios::binary) << r.body << "\n";
      continue;
    }
    std::string want = testing::read_file(testing::golden_path(c.name));
    if (!want.empty() && want.back() == '\n') want.pop_back();
    CHECK(r.body == want);
    // Canonical: re-encoding the decoded body changes nothing.
    CHECK(api::encode(api::decode(r.body)) == r.body);
  }
}
