#include <doctest.h>

#include <filesystem>
#include <set>

#include "dc/error.hpp"
#include "dc/ingest/csv.hpp"
#include "dc/ingest/pipeline.hpp"
#include "dc/ingest/template.hpp"
#include "dc/stat/stat_api.hpp"
#include "test_support.hpp"

using namespace dc;
using kg::Dcid;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kBadRequest;
}

const char* kCountryTemplate = R"(
[entity]
column = "Country"
description = { name = "{}", typeOf = "Country" }
[date]
column = "Year"
[[variables]]
column = "Population"
variable = "dc/var/TotalPop"
[provenance]
dcid = "prov/fixture-census"
source_url = "https://example.org/fixture/census"
import_name = "fixture census"
import_date = "2023-06-01"
)";

std::unique_ptr<kg::Store> f1() {
  auto s = std::make_unique<kg::Store>(":memory:");
  testing::import_fixtures(*s, {"f1.dcnf"});
  return s;
}

// Independent reading of the states fixture: each data line is
// name,population,income where quoted cells may hold commas.
struct StateRow {
  std::string name;
  bool has_pop = false;
  bool has_income = false;
};

std::vector<StateRow> scan_states(const std::string& text) {
  std::vector<StateRow> out;
  std::size_t pos = text.find('\n') + 1;  // skip header
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (char c : line) {
      if (c == '"') quoted = !quoted;
      else if (c == ',' && !quoted) cells.emplace_back();
      else cells.back() += c;
    }
    out.push_back({cells[0], !cells[1].empty(), !cells[2].empty()});
  }
  return out;
}

}  // namespace

TEST_CASE("csv syntax") {
  const auto t = ingest::parse_csv("\xEF\xBB\xBF" "a,b,c\r\n1,\"x, y\",\"say \"\"hi\"\"\"\r\n2\n\"multi\nline\",,\n");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "x, y", "say \"hi\""});
  CHECK(t.rows[1] == std::vector<std::string>{"2", "", ""});
  CHECK(t.rows[2][0] == "multi\nline");
  CHECK(t.row_lines == std::vector<std::size_t>{2, 3, 4});

  CHECK(ingest::parse_csv("").rows.empty());
  CHECK(ingest::parse_csv("a,b\n").rows.empty());
}

TEST_CASE("csv errors carry the line") {
  for (const char* bad : {"a,b\n1,\"open\n", "a,b\n1,2,3\n", "a,b\n1,x\"y\n"}) {
    CAPTURE(bad);
    try {
      ingest::parse_csv(bad);
      FAIL("expected CsvMalformed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kCsvMalformed);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  CHECK(code_of([] { ingest::parse_csv("a\n\xFF\n"); }) == ErrorCode::kEncoding);
}

TEST_CASE("csv numbers") {
  CHECK(ingest::parse_csv_number("1,234")->str() == "1234");
  CHECK(ingest::parse_csv_number(" 4080000 ")->str() == "4080000");
  CHECK(ingest::parse_csv_number("8.70")->str() == "8.7");
  CHECK(ingest::parse_csv_number("-1.5e3")->str() == "-1500");
  for (const char* bad : {"", "  ", "n/a", "12abc", "1.2.3", "$5"}) {
    CAPTURE(bad);
    CHECK_FALSE(ingest::parse_csv_number(bad));
  }
}

TEST_CASE("template parsing") {
  const auto t = ingest::parse_template(testing::read_file(testing::fixture_path("states.toml")));
  CHECK(t.entity_column == "State");
  CHECK(t.entity_description.at(Dcid("name")) == "{}");
  CHECK(t.entity_description.at(Dcid("typeOf")) == "AdministrativeArea1");
  CHECK(t.fixed_date == kg::PartialDate::parse("2021"));
  CHECK_FALSE(t.date_column);
  REQUIRE(t.variables.size() == 2);
  CHECK(t.variables[1].unit == Dcid("USDollar"));
  CHECK(t.variables[0].scale.str() == "1");
  CHECK(t.provenance.dcid == Dcid("prov/fixture-acs"));
  CHECK(t.provenance.import_date.str() == "2024-02-01");

  const std::string base = kCountryTemplate;
  for (const std::string& bad : {
           std::string("not [toml"),
           base + "[extra]\n",                                     // unknown section
           std::string(R"([entity]
column = "C"
dcid = true
[date]
fixed = "2020"
[provenance]
dcid = "prov/x"
import_date = "2020-01-01"
)"),                                                               // no variables
           base.substr(0, base.find("[date]")) + base.substr(base.find("[[variables]]")),  // no date
       }) {
    CAPTURE(bad);
    CHECK(code_of([&] { ingest::parse_template(bad); }) == ErrorCode::kTemplateInvalid);
  }
  std::string scaled = base;
  scaled.insert(scaled.find("[provenance]"), "scale = 0\n");
  CHECK(code_of([&] { ingest::parse_template(scaled); }) == ErrorCode::kTemplateInvalid);
  scaled.replace(scaled.find("scale = 0"), 9, "scale = 1000");
  CHECK(ingest::parse_template(scaled).variables[0].scale.str() == "1000");
}

TEST_CASE("one-row csv reproduces the census value") {
  auto s = f1();
  const auto before = s->triple_count();
  const auto tmpl = ingest::parse_template(kCountryTemplate);
  const auto report = ingest::import_csv(*s, "Country,Year,Population\nCroatia,2019,4080000\n", tmpl);
  CHECK(report.rows_skipped.empty());
  // The fixture names its node explicitly; the CSV row maps to a derived one.
  CHECK(report.triples_added == 5);
  CHECK(report.observations_added == 1);
  CHECK(s->triple_count() == before + 5);
  const auto obs = stat::get_point(*s, Dcid("dc/var/TotalPop"), Dcid("country/HRV"),
                                   kg::PartialDate::parse("2019"));
  REQUIRE(obs);
  CHECK(obs->value.str() == "4080000");
  CHECK(obs->provenance == Dcid("prov/fixture-census"));
  CHECK(ingest::import_csv(*s, "Country,Year,Population\nCroatia,2019,4080000\n", tmpl) ==
        ingest::ImportReport{});
}

TEST_CASE("header-only csv imports nothing") {
  auto s = f1();
  const auto report =
      ingest::import_csv(*s, "Country,Year,Population\r\n", ingest::parse_template(kCountryTemplate));
  CHECK(report == ingest::ImportReport{});
}

TEST_CASE("csv row skips") {
  auto s = f1();
  const auto tmpl = ingest::parse_template(kCountryTemplate);
  const auto report = ingest::import_csv(*s,
                                         "Country,Year,Population\n"
                                         "Atlantis,2019,1\n"
                                         "Georgia,20x9,2\n"
                                         "Georgia,2019,lots\n"
                                         "Georgia,2018,\n"
                                         "georgia,2018,3700000\n",
                                         tmpl);
  REQUIRE(report.rows_skipped.size() == 3);
  CHECK(report.rows_skipped[0].row == 1);
  CHECK(report.rows_skipped[0].reason.starts_with("Unresolved"));
  CHECK(report.rows_skipped[1].row == 2);
  CHECK(report.rows_skipped[1].reason.starts_with("InvalidDate"));
  CHECK(report.rows_skipped[2].row == 3);
  CHECK(report.rows_skipped[2].reason.starts_with("NonNumeric"));
  CHECK(report.observations_added == 1);
  CHECK(stat::get_point(*s, Dcid("dc/var/TotalPop"), Dcid("country/GEO"), kg::PartialDate::parse("2018")));
}

TEST_CASE("ambiguous entity is skipped") {
  auto s = f1();
  auto tmpl = ingest::parse_template(kCountryTemplate);
  tmpl.entity_description.erase(Dcid("typeOf"));
  const auto report = ingest::import_csv(*s, "Country,Year,Population\nGeorgia,2018,1\n", tmpl);
  REQUIRE(report.rows_skipped.size() == 1);
  CHECK(report.rows_skipped[0].reason.starts_with("Ambiguous: 2 candidates"));
  CHECK(report.triples_added == 0);
}

TEST_CASE("template errors against the data") {
  auto s = f1();
  auto tmpl = ingest::parse_template(kCountryTemplate);
  CHECK(code_of([&] { ingest::import_csv(*s, "Nation,Year,Population\n", tmpl); }) ==
        ErrorCode::kTemplateInvalid);
  tmpl.variables[0].variable = Dcid("country/GEO");
  CHECK(code_of([&] { ingest::import_csv(*s, "Country,Year,Population\n", tmpl); }) ==
        ErrorCode::kTemplateInvalid);
}

TEST_CASE("scale multiplies exactly") {
  auto s = f1();
  auto tmpl = ingest::parse_template(kCountryTemplate);
  tmpl.variables[0].scale = kg::Decimal::parse("1000");
  ingest::import_csv(*s, "Country,Year,Population\nGeorgia,2010,\"4,100.5\"\n", tmpl);
  const auto obs = stat::get_point(*s, Dcid("dc/var/TotalPop"), Dcid("country/GEO"),
                                   kg::PartialDate::parse("2010"));
  REQUIRE(obs);
  CHECK(obs->value.str() == "4100500");
}

TEST_CASE("states csv against an independent cell count") {
  const auto rows = scan_states(testing::read_file(testing::fixture_path("states.csv")));
  REQUIRE(rows.size() == 50);
  const std::set<std::string> misspelled = {"Calfornia", "Nwe York", "Texass"};
  std::size_t pop = 0, income = 0;
  std::vector<std::size_t> bad_rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (misspelled.count(rows[i].name)) {
      bad_rows.push_back(i + 1);
      continue;
    }
    pop += rows[i].has_pop;
    income += rows[i].has_income;
  }
  // Population nodes carry 5 triples, income nodes 6 (unit).
  const std::size_t expected_triples = 5 * pop + 6 * income;

  kg::Store s(":memory:");
  const auto report = testing::import_fixtures(s, {"f1.dcnf", "states.csv"}, "states.toml");
  const auto f1_only = testing::import_fixtures(*std::make_unique<kg::Store>(":memory:"), {"f1.dcnf"});
  CHECK(report.observations_added == f1_only.observations_added + pop + income);
  CHECK(report.observations_added - f1_only.observations_added == 94);
  CHECK(report.triples_added - f1_only.triples_added == expected_triples);
  REQUIRE(report.rows_skipped.size() == bad_rows.size());
  for (std::size_t i = 0; i < bad_rows.size(); ++i) {
    CHECK(report.rows_skipped[i].row == bad_rows[i]);
    CHECK(report.rows_skipped[i].reason.starts_with("Unresolved"));
  }
  CHECK(report.violations.empty());
  const auto states = stat::get_collection(s, Dcid("dc/var/TotalPop"), Dcid("country/USA"),
                                           Dcid("AdministrativeArea1"), stat::kLatest);
  CHECK(states.size() == 50);
}

TEST_CASE("re-import is a no-op") {
  kg::Store s(":memory:");
  testing::import_fixtures(s, {"f1.dcnf", "states.csv"}, "states.toml");
  const auto before = s.all_triples();
  const auto again = testing::import_fixtures(s, {"f1.dcnf", "states.csv"}, "states.toml");
  CHECK(again.triples_added == 0);
  CHECK(again.observations_added == 0);
  CHECK(again.rows_skipped.size() == 3);
  CHECK(s.all_triples() == before);
}

TEST_CASE("node file order does not matter") {
  kg::Store a(":memory:"), b(":memory:");
  testing::import_fixtures(a, {"f1.dcnf", "f2.dcnf", "f3.dcnf"});
  testing::import_fixtures(b, {"f3.dcnf", "f2.dcnf", "f1.dcnf"});
  CHECK(a.all_triples() == b.all_triples());
  const Dcid sf("geoId/06075");
  for (const auto& v : stat::list_variables(a, sf)) {
    CHECK(stat::get_series(a, v, sf) == stat::get_series(b, v, sf));
  }
}

TEST_CASE("parse errors are collected per source") {
  kg::Store s(":memory:");
  std::vector<ingest::ImportSource> sources = {
      {ingest::SourceKind::kNodes, "bad.dcnf",
       "@provenance prov/x\n@importDate 2024-01-01\n\ndcid: a\nname: oops oops\n\ndcid: b\nname: \"fine\"\n",
       std::nullopt}};
  const auto report = ingest::import_and_validate(s, sources);
  REQUIRE(report.parse_errors.size() == 1);
  CHECK(report.parse_errors[0].source == "bad.dcnf");
  CHECK(report.parse_errors[0].error.line == 5);
  CHECK(report.triples_added == 1);
}

TEST_CASE("unreadable files and missing templates") {
  const std::vector<std::filesystem::path> missing = {"/nonexistent/x.dcnf"};
  CHECK(code_of([&] { ingest::load_sources(missing, std::nullopt); }) == ErrorCode::kIo);
  const std::vector<std::filesystem::path> csv = {testing::fixture_path("states.csv")};
  CHECK(code_of([&] { ingest::load_sources(csv, std::nullopt); }) == ErrorCode::kTemplateInvalid);
}
