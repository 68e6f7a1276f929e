#include "dc/api/wire.hpp"

#include <cctype>
#include <cmath>

namespace dc::api {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kDecode, what); }

void write(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::null:
      out += "null";
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      return;
    case Json::value_t::number_float:
      out += kg::Decimal::from_double(j.get<double>()).str();
      return;
    case Json::value_t::string:
      out += Json(j.get_ref<const std::string&>()).dump();
      return;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const Json& e : j) {
        if (!first) out += ',';
        first = false;
        write(e, out);
      }
      out += ']';
      return;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(k).dump();
        out += ':';
        write(v, out);
      }
      out += '}';
      return;
    }
    default:
      throw Error(ErrorCode::kMalformedValue, "value has no JSON encoding");
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected object with '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected object with '") + key + "'");
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::string str(const Json& j, const char* what) {
  if (!j.is_string()) bad(std::string("'") + what + "' must be a string");
  return j.get<std::string>();
}

kg::Dcid dcid(const Json& j, const char* what) {
  std::string s = str(j, what);
  if (!kg::Dcid::is_valid(s)) bad(std::string("'") + what + "' is not a dcid: " + s);
  return kg::Dcid(std::move(s));
}

kg::PartialDate date(const Json& j, const char* what) {
  auto d = kg::PartialDate::try_parse(str(j, what));
  if (!d) bad(std::string("'") + what + "' is not a date");
  return *d;
}

int integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string("'") + what + "' must be an integer");
  return j.get<int>();
}

const Json& array(const Json& j, const char* what) {
  if (!j.is_array()) bad(std::string("'") + what + "' must be an array");
  return j;
}

Json dcids(const std::vector<kg::Dcid>& v) {
  Json a = Json::array();
  for (const auto& d : v) a.push_back(d.str());
  return a;
}

std::vector<kg::Dcid> read_dcids(const Json& j, const char* what) {
  std::vector<kg::Dcid> out;
  for (const Json& e : array(j, what)) out.push_back(dcid(e, what));
  return out;
}

Json ints(const std::vector<int>& v) { return Json(v); }

std::vector<int> read_ints(const Json& j, const char* what) {
  std::vector<int> out;
  for (const Json& e : array(j, what)) out.push_back(integer(e, what));
  return out;
}

void put_warnings(Json& j, const std::vector<federation::Warning>& ws) {
  if (ws.empty()) return;
  Json a = Json::array();
  for (const auto& w : ws) a.push_back(to_json(w));
  j["warnings"] = std::move(a);
}

std::vector<federation::Warning> read_warnings(const Json& j) {
  std::vector<federation::Warning> out;
  if (const Json* w = optional_field(j, "warnings"))
    for (const Json& e : array(*w, "warnings")) out.push_back(from_json<federation::Warning>(e));
  return out;
}

template <class T>
std::vector<T> read_list(const Json& j, const char* key) {
  std::vector<T> out;
  for (const Json& e : array(field(j, key), key)) out.push_back(from_json<T>(e));
  return out;
}

void check_parallel(std::size_t items, std::size_t origins) {
  if (items != origins) bad("origins must parallel items");
}

}  // namespace

std::string encode(const Json& value) {
  std::string out;
  write(value, out);
  return out;
}

Json decode(std::string_view bytes) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    // nlohmann reports the 1-based position of the offending byte.
    throw DecodeError(e.byte == 0 ? 0 : e.byte - 1, e.what());
  }
}

Json error_body(std::string_view code, std::string_view message) {
  return Json{{"error", {{"code", code}, {"message", message}}}};
}

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

// --- values ---

Json to_json(const kg::Decimal& d) {
  if (auto i = d.to_int64()) return Json(*i);
  const double v = d.to_double();
  if (std::isfinite(v) && kg::Decimal::from_double(v) == d) return Json(v);
  return Json(d.str());
}

template <>
kg::Decimal from_json(const Json& j) {
  if (j.is_number_integer()) {
    return j.is_number_unsigned() ? kg::Decimal::parse(std::to_string(j.get<std::uint64_t>()))
                                  : kg::Decimal::from_int(j.get<std::int64_t>());
  }
  if (j.is_number_float()) return kg::Decimal::from_double(j.get<double>());
  if (j.is_string()) {
    if (auto d = kg::Decimal::try_parse(j.get<std::string>())) return *d;
  }
  bad("expected a decimal");
}

Json to_json(const kg::NodeValue& v) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, kg::Dcid>) {
          return {{"ref", x.str()}};
        } else if constexpr (std::is_same_v<T, kg::Text>) {
          return {{"text", x.value}};
        } else if constexpr (std::is_same_v<T, kg::Decimal>) {
          return {{"number", to_json(x)}};
        } else if constexpr (std::is_same_v<T, kg::PartialDate>) {
          return {{"date", x.str()}};
        } else if constexpr (std::is_same_v<T, kg::Quantity>) {
          return {{"quantity", {{"unit", x.unit.str()}, {"value", to_json(x.value)}}}};
        } else if constexpr (std::is_same_v<T, kg::QuantityRange>) {
          Json r{{"unit", x.unit.str()}};
          if (x.low) r["low"] = to_json(*x.low);
          if (x.high) r["high"] = to_json(*x.high);
          return {{"quantityRange", std::move(r)}};
        } else {
          return {{"latLng", {{"latitude", to_json(x.latitude)},
                              {"longitude", to_json(x.longitude)}}}};
        }
      },
      v.get());
}

template <>
kg::NodeValue from_json(const Json& j) {
  if (!j.is_object() || j.size() != 1) bad("node value must be an object with one kind key");
  const auto& [kind, body] = *j.items().begin();
  try {
    if (kind == "ref") return kg::NodeValue(dcid(body, "ref"));
    if (kind == "text") return kg::NodeValue(kg::Text{str(body, "text")});
    if (kind == "number") return kg::NodeValue(from_json<kg::Decimal>(body));
    if (kind == "date") return kg::NodeValue(date(body, "date"));
    if (kind == "quantity") {
      return kg::NodeValue(kg::Quantity{from_json<kg::Decimal>(field(body, "value")),
                                        dcid(field(body, "unit"), "unit")});
    }
    if (kind == "quantityRange") {
      kg::QuantityRange r;
      if (const Json* lo = optional_field(body, "low")) r.low = from_json<kg::Decimal>(*lo);
      if (const Json* hi = optional_field(body, "high")) r.high = from_json<kg::Decimal>(*hi);
      r.unit = dcid(field(body, "unit"), "unit");
      return kg::NodeValue(std::move(r));
    }
    if (kind == "latLng") {
      return kg::NodeValue(kg::LatLng{from_json<kg::Decimal>(field(body, "latitude")),
                                      from_json<kg::Decimal>(field(body, "longitude"))});
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDecode) throw;
    bad(e.what());
  }
  bad("unknown node value kind '" + kind + "'");
}

Json to_json(const kg::Triple& t) {
  return {{"subject", t.subject.str()},
          {"predicate", t.predicate.str()},
          {"object", to_json(t.object)},
          {"provenance", t.provenance.str()}};
}

template <>
kg::Triple from_json(const Json& j) {
  return {dcid(field(j, "subject"), "subject"), dcid(field(j, "predicate"), "predicate"),
          from_json<kg::NodeValue>(field(j, "object")),
          dcid(field(j, "provenance"), "provenance")};
}

Json to_json(const stat::Observation& o) {
  Json j{{"variable", o.variable.str()},
         {"entity", o.entity.str()},
         {"date", o.date.str()},
         {"value", to_json(o.value)},
         {"provenance", o.provenance.str()}};
  if (o.unit) j["unit"] = o.unit->str();
  if (o.measurement_method) j["measurementMethod"] = o.measurement_method->str();
  return j;
}

template <>
stat::Observation from_json(const Json& j) {
  stat::Observation o{dcid(field(j, "variable"), "variable"),
                      dcid(field(j, "entity"), "entity"),
                      date(field(j, "date"), "date"),
                      from_json<kg::Decimal>(field(j, "value")),
                      std::nullopt,
                      std::nullopt,
                      dcid(field(j, "provenance"), "provenance")};
  if (const Json* u = optional_field(j, "unit")) o.unit = dcid(*u, "unit");
  if (const Json* m = optional_field(j, "measurementMethod"))
    o.measurement_method = dcid(*m, "measurementMethod");
  return o;
}

Json to_json(const stat::Series& s) {
  Json points = Json::array();
  for (const auto& p : s.points) {
    points.push_back(
        {{"date", p.date.str()}, {"value", to_json(p.value)}, {"provenance", p.provenance.str()}});
  }
  return {{"variable", s.variable.str()}, {"entity", s.entity.str()}, {"points", points}};
}

template <>
stat::Series from_json(const Json& j) {
  stat::Series s{dcid(field(j, "variable"), "variable"), dcid(field(j, "entity"), "entity"), {}};
  for (const Json& p : array(field(j, "points"), "points")) {
    s.points.push_back({date(field(p, "date"), "date"), from_json<kg::Decimal>(field(p, "value")),
                        dcid(field(p, "provenance"), "provenance")});
  }
  return s;
}

Json to_json(const resolver::Candidate& c) {
  return {{"dcid", c.dcid.str()}, {"score", c.score}};
}

template <>
resolver::Candidate from_json(const Json& j) {
  const Json& score = field(j, "score");
  if (!score.is_number()) bad("'score' must be a number");
  return {dcid(field(j, "dcid"), "dcid"), score.get<double>()};
}

Json to_json(const resolver::Description& d) {
  Json j = Json::object();
  for (const auto& [prop, value] : d.constraints) {
    if (const auto* s = std::get_if<std::string>(&value)) {
      j[prop.str()] = *s;
    } else {
      j[prop.str()] = to_json(std::get<kg::NodeValue>(value));
    }
  }
  return j;
}

template <>
resolver::Description from_json(const Json& j) {
  if (!j.is_object()) bad("description must be an object");
  resolver::Description d;
  for (const auto& [key, value] : j.items()) {
    if (!kg::Dcid::is_valid(key)) bad("description property is not a dcid: " + key);
    if (value.is_string()) {
      d.constraints.emplace(kg::Dcid(key), value.get<std::string>());
    } else {
      d.constraints.emplace(kg::Dcid(key), from_json<kg::NodeValue>(value));
    }
  }
  return d;
}

Json to_json(const federation::Warning& w) {
  return {{"code", w.code}, {"endpoint", w.endpoint}, {"reason", w.reason}};
}

template <>
federation::Warning from_json(const Json& j) {
  return {str(field(j, "code"), "code"), str(field(j, "endpoint"), "endpoint"),
          str(field(j, "reason"), "reason")};
}

// --- responses ---

Json to_json(const federation::ArcsResult& r) {
  Json j{{"labels", dcids(r.labels)}};
  put_warnings(j, r.warnings);
  return j;
}

template <>
federation::ArcsResult from_json(const Json& j) {
  return {read_dcids(field(j, "labels"), "labels"), read_warnings(j)};
}

Json to_json(const federation::TriplesResult& r) {
  Json triples = Json::array();
  for (const auto& t : r.triples) triples.push_back(to_json(t));
  Json j{{"triples", std::move(triples)}, {"origins", ints(r.origins)}};
  put_warnings(j, r.warnings);
  return j;
}

template <>
federation::TriplesResult from_json(const Json& j) {
  federation::TriplesResult r{read_list<kg::Triple>(j, "triples"),
                              read_ints(field(j, "origins"), "origins"), read_warnings(j)};
  check_parallel(r.triples.size(), r.origins.size());
  return r;
}

Json to_json(const federation::ResolveResult& r) {
  Json cands = Json::array();
  for (const auto& c : r.candidates) cands.push_back(to_json(c));
  Json j{{"candidates", std::move(cands)}, {"origins", ints(r.origins)}};
  put_warnings(j, r.warnings);
  return j;
}

template <>
federation::ResolveResult from_json(const Json& j) {
  federation::ResolveResult r{read_list<resolver::Candidate>(j, "candidates"),
                              read_ints(field(j, "origins"), "origins"), read_warnings(j)};
  check_parallel(r.candidates.size(), r.origins.size());
  return r;
}

Json to_json(const federation::PointResult& r) {
  Json j{{"observation", nullptr}};
  if (r.observation) {
    j["observation"] = to_json(*r.observation);
    j["origin"] = r.origin;
  }
  put_warnings(j, r.warnings);
  return j;
}

template <>
federation::PointResult from_json(const Json& j) {
  federation::PointResult r;
  if (const Json* o = optional_field(j, "observation")) {
    r.observation = from_json<stat::Observation>(*o);
    r.origin = integer(field(j, "origin"), "origin");
  }
  r.warnings = read_warnings(j);
  return r;
}

Json to_json(const federation::SeriesResult& r) {
  Json j{{"series", to_json(r.series)}, {"origins", ints(r.origins)}};
  put_warnings(j, r.warnings);
  return j;
}

template <>
federation::SeriesResult from_json(const Json& j) {
  federation::SeriesResult r{from_json<stat::Series>(field(j, "series")),
                             read_ints(field(j, "origins"), "origins"), read_warnings(j)};
  check_parallel(r.series.points.size(), r.origins.size());
  return r;
}

Json to_json(const federation::CollectionResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"entity", row.entity.str()}, {"observation", to_json(row.observation)}});
  Json j{{"rows", std::move(rows)}, {"origins", ints(r.origins)}, {"children", dcids(r.children)}};
  put_warnings(j, r.warnings);
  return j;
}

template <>
federation::CollectionResult from_json(const Json& j) {
  federation::CollectionResult r;
  for (const Json& row : array(field(j, "rows"), "rows")) {
    r.rows.push_back({dcid(field(row, "entity"), "entity"),
                      from_json<stat::Observation>(field(row, "observation"))});
  }
  r.origins = read_ints(field(j, "origins"), "origins");
  r.children = read_dcids(field(j, "children"), "children");
  r.warnings = read_warnings(j);
  check_parallel(r.rows.size(), r.origins.size());
  return r;
}

Json to_json(const federation::VariablesResult& r) {
  Json j{{"variables", dcids(r.variables)}, {"origins", ints(r.origins)}};
  put_warnings(j, r.warnings);
  return j;
}

template <>
federation::VariablesResult from_json(const Json& j) {
  federation::VariablesResult r{read_dcids(field(j, "variables"), "variables"),
                                read_ints(field(j, "origins"), "origins"), read_warnings(j)};
  check_parallel(r.variables.size(), r.origins.size());
  return r;
}

Json to_json(const federation::InfoResult& r) {
  Json bases = Json::array();
  for (const auto& b : r.bases) bases.push_back({{"endpoint", b.url}, {"timeoutMs", b.timeout_ms}});
  return {{"instanceId", r.instance_id},
          {"bases", std::move(bases)},
          {"maxDepth", r.max_depth},
          {"tripleCount", r.triple_count}};
}

template <>
federation::InfoResult from_json(const Json& j) {
  federation::InfoResult r;
  r.instance_id = str(field(j, "instanceId"), "instanceId");
  for (const Json& b : array(field(j, "bases"), "bases"))
    r.bases.push_back({str(field(b, "endpoint"), "endpoint"), integer(field(b, "timeoutMs"), "timeoutMs")});
  r.max_depth = integer(field(j, "maxDepth"), "maxDepth");
  const Json& count = field(j, "tripleCount");
  if (!count.is_number_integer()) bad("'tripleCount' must be an integer");
  r.triple_count = count.get<std::uint64_t>();
  return r;
}

Json to_json(const ingest::ImportReport& r) {
  Json skipped = Json::array();
  for (const auto& s : r.rows_skipped) skipped.push_back({{"row", s.row}, {"reason", s.reason}});
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    Json e{{"kind", schema::to_string(v.kind)}, {"subject", v.subject.str()}, {"detail", v.detail}};
    if (v.predicate) e["predicate"] = v.predicate->str();
    violations.push_back(std::move(e));
  }
  Json errors = Json::array();
  for (const auto& e : r.parse_errors) {
    errors.push_back({{"source", e.source}, {"line", e.error.line}, {"reason", e.error.reason}});
  }
  return {{"triplesAdded", r.triples_added},
          {"observationsAdded", r.observations_added},
          {"rowsSkipped", std::move(skipped)},
          {"violations", std::move(violations)},
          {"parseErrors", std::move(errors)}};
}

template <>
ingest::ImportReport from_json(const Json& j) {
  auto count = [&](const char* key) -> std::size_t {
    const Json& v = field(j, key);
    if (!v.is_number_integer()) bad(std::string("'") + key + "' must be an integer");
    return v.get<std::size_t>();
  };
  ingest::ImportReport r;
  r.triples_added = count("triplesAdded");
  r.observations_added = count("observationsAdded");
  for (const Json& s : array(field(j, "rowsSkipped"), "rowsSkipped")) {
    const Json& row = field(s, "row");
    if (!row.is_number_integer()) bad("'row' must be an integer");
    r.rows_skipped.push_back({row.get<std::size_t>(), str(field(s, "reason"), "reason")});
  }
  for (const Json& v : array(field(j, "violations"), "violations")) {
    const std::string kind = str(field(v, "kind"), "kind");
    std::optional<schema::ViolationKind> parsed;
    for (int k = 0; k <= static_cast<int>(schema::ViolationKind::kContainmentCycle); ++k) {
      if (schema::to_string(static_cast<schema::ViolationKind>(k)) == kind)
        parsed = static_cast<schema::ViolationKind>(k);
    }
    if (!parsed) bad("unknown violation kind '" + kind + "'");
    schema::Violation out{*parsed, dcid(field(v, "subject"), "subject"), std::nullopt,
                          str(field(v, "detail"), "detail")};
    if (const Json* p = optional_field(v, "predicate")) out.predicate = dcid(*p, "predicate");
    r.violations.push_back(std::move(out));
  }
  for (const Json& e : array(field(j, "parseErrors"), "parseErrors")) {
    const Json& line = field(e, "line");
    if (!line.is_number_integer()) bad("'line' must be an integer");
    r.parse_errors.push_back(
        {str(field(e, "source"), "source"), {line.get<std::size_t>(), str(field(e, "reason"), "reason")}});
  }
  return r;
}

}  // namespace dc::api
