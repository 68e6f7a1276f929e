#include "test_support.hpp"

#include <algorithm>
#include <map>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "dc/error.hpp"
#include "dc/kg/terms.hpp"

#ifndef DC_FIXTURE_DIR
#error "DC_FIXTURE_DIR must point at the fixtures directory"
#endif

namespace dc::testing {

using kg::Dcid;
using kg::NodeValue;
using kg::Triple;

std::string fixture_path(const std::string& name) { return std::string(DC_FIXTURE_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ingest::ImportReport import_fixtures(kg::Store& store, std::initializer_list<std::string> names,
                                     const std::optional<std::string>& csv_template) {
  std::vector<std::filesystem::path> paths;
  for (const auto& n : names) paths.emplace_back(fixture_path(n));
  std::optional<std::filesystem::path> tmpl;
  if (csv_template) tmpl = fixture_path(*csv_template);
  auto sources = ingest::load_sources(paths, tmpl);
  return ingest::import_and_validate(store, sources);
}

std::unique_ptr<kg::Store> flatten(const std::vector<const kg::Store*>& stores) {
  auto out = std::make_unique<kg::Store>(":memory:");
  for (const kg::Store* s : stores) {
    for (const auto& p : s->provenances()) out->register_provenance(p);
    const auto triples = s->all_triples();
    out->insert_triples(triples);
  }
  return out;
}

// ---- random graphs ---------------------------------------------------------

namespace {

const char* const kNames[] = {"Georgia", "georgia", "GEORGIA", "Paris", "paris", "Lyon",
                              "Springfield", "springfield", "Zürich", "n/1"};
const char* const kNumbers[] = {"0", "1", "-2.5", "1e6", "4080000", "0.000001", "1e-7", "3.14", "42"};
const char* const kDates[] = {"2019", "2019-06", "2019-06-30", "2020", "1999-12"};
const char* const kLongitudes[] = {"44.8", "-122.4", "0", "179.99"};
const char* const kUnits[] = {"Kilogram", "Year", "USDollar"};

template <class T, std::size_t N>
const T& pick(std::mt19937_64& rng, const T (&arr)[N]) {
  return arr[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

NodeValue random_value(std::mt19937_64& rng, const RandomGraph& g) {
  switch (std::uniform_int_distribution<int>(0, 7)(rng)) {
    case 0:
    case 1:
      return NodeValue(pick(rng, g.nodes));
    case 2:
      return NodeValue::text(pick(rng, kNames));
    case 3:
      return NodeValue::number(pick(rng, kNumbers));
    case 4:
      return NodeValue::date(pick(rng, kDates));
    case 5:
      return NodeValue(kg::Quantity{kg::Decimal::parse(pick(rng, kNumbers)), Dcid(pick(rng, kUnits))});
    case 6: {
      kg::QuantityRange r{kg::Decimal::parse("1"), kg::Decimal::parse("5"), Dcid(pick(rng, kUnits))};
      if (chance(rng, 0.3)) r.low.reset();
      return NodeValue(std::move(r));
    }
    default:
      return NodeValue(kg::LatLng{kg::Decimal::parse("41.7"), kg::Decimal::parse(pick(rng, kLongitudes))});
  }
}

}  // namespace

RandomGraph random_graph(std::mt19937_64& rng, std::size_t triple_count) {
  RandomGraph g;
  for (int i = 0; i < 3; ++i) {
    g.provenances.push_back({Dcid("prov/r" + std::to_string(i)), "https://example.org/r",
                             "random", kg::PartialDate::parse("2024-01-0" + std::to_string(i + 1))});
  }
  const std::size_t node_count = std::max<std::size_t>(3, triple_count / 8);
  for (std::size_t i = 0; i < node_count; ++i) g.nodes.emplace_back("n/" + std::to_string(i));
  g.predicates = {Dcid("name"), Dcid("typeOf"), Dcid("containedInPlace"), Dcid("p0"),
                  Dcid("p1"),   Dcid("p2"),     Dcid("p3")};
  const std::vector<Dcid> classes = {Dcid("C0"), Dcid("C1"), Dcid("C2"), Dcid("Country")};

  while (g.triples.size() < triple_count) {
    if (!g.triples.empty() && chance(rng, 0.05)) {
      // Same statement again, possibly from another source.
      Triple t = pick(rng, g.triples);
      t.provenance = pick(rng, g.provenances).dcid;
      g.triples.push_back(std::move(t));
      continue;
    }
    Triple t;
    t.subject = pick(rng, g.nodes);
    t.predicate = pick(rng, g.predicates);
    t.provenance = pick(rng, g.provenances).dcid;
    if (t.predicate.str() == "name") {
      t.object = NodeValue::text(pick(rng, kNames));
    } else if (t.predicate.str() == "typeOf") {
      t.object = NodeValue(pick(rng, classes));
    } else if (t.predicate.str() == "containedInPlace") {
      t.object = NodeValue(pick(rng, g.nodes));
    } else {
      t.object = random_value(rng, g);
    }
    g.triples.push_back(std::move(t));
  }
  return g;
}

void load(kg::Store& store, const RandomGraph& graph) {
  for (const auto& p : graph.provenances) store.register_provenance(p);
  store.insert_triples(graph.triples);
}

std::vector<resolver::Description> random_descriptions(std::mt19937_64& rng,
                                                       const RandomGraph& graph,
                                                       std::size_t count) {
  std::vector<resolver::Description> out;
  while (out.size() < count) {
    resolver::Description d;
    if (chance(rng, 0.15)) {
      d.constraints.emplace(Dcid("name"), std::string("Nowhere"));
      if (chance(rng, 0.5)) d.constraints.emplace(Dcid("typeOf"), std::string("C0"));
      out.push_back(std::move(d));
      continue;
    }
    const Dcid& node = pick(rng, graph.nodes);
    std::vector<const Triple*> own;
    for (const Triple& t : graph.triples)
      if (t.subject == node) own.push_back(&t);
    if (own.empty()) continue;
    const int wanted = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int k = 0; k < wanted; ++k) {
      const Triple& t = *pick(rng, own);
      if (const kg::Text* text = t.object.as_text(); text && chance(rng, 0.6)) {
        std::string s = text->value;
        if (t.predicate.str() == "name" && chance(rng, 0.4)) {
          for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        d.constraints.insert_or_assign(t.predicate, s);
      } else if (const Dcid* ref = t.object.as_ref(); ref && chance(rng, 0.6)) {
        d.constraints.insert_or_assign(t.predicate, ref->str());
      } else {
        d.constraints.insert_or_assign(t.predicate, t.object);
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

// ---- oracles ---------------------------------------------------------------

namespace oracle {

namespace {

bool touches(const Triple& t, const Dcid& node, kg::Direction direction) {
  if (direction == kg::Direction::kOut) return t.subject == node;
  const Dcid* ref = t.object.as_ref();
  return ref && *ref == node;
}

std::string fold(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

bool value_matches(const Dcid& predicate, const resolver::DescriptionValue& v, const NodeValue& o) {
  const bool is_name = predicate.str() == "name";
  const kg::Text* text = o.as_text();
  if (const auto* s = std::get_if<std::string>(&v)) {
    if (const Dcid* ref = o.as_ref()) return ref->str() == *s;
    if (!text) return false;
    return is_name ? fold(text->value) == fold(*s) : text->value == *s;
  }
  const NodeValue& typed = std::get<NodeValue>(v);
  if (is_name && text && typed.as_text()) return fold(text->value) == fold(typed.as_text()->value);
  return typed == o;
}

bool exact_name(const Dcid& predicate, const resolver::DescriptionValue& v, const NodeValue& o) {
  const kg::Text* text = o.as_text();
  if (!text || predicate.str() != "name") return false;
  if (const auto* s = std::get_if<std::string>(&v)) return text->value == *s;
  return std::get<NodeValue>(v) == o;
}

}  // namespace

std::vector<Dcid> arc_labels(const std::vector<Triple>& triples, const Dcid& node,
                             kg::Direction direction) {
  std::set<Dcid> labels;
  for (const Triple& t : triples)
    if (touches(t, node, direction)) labels.insert(t.predicate);
  return {labels.begin(), labels.end()};
}

std::vector<Triple> neighbors(const std::vector<Triple>& triples, const Dcid& node,
                              const std::optional<Dcid>& label, kg::Direction direction,
                              const std::optional<Dcid>& provenance) {
  std::vector<Triple> out;
  for (const Triple& t : triples) {
    if (!touches(t, node, direction)) continue;
    if (label && t.predicate != *label) continue;
    if (provenance && t.provenance != *provenance) continue;
    out.push_back(t);
  }
  out = sorted_unique(std::move(out));
  auto key = [direction](const Triple& t) {
    return std::make_tuple(t.predicate.str(),
                           direction == kg::Direction::kOut ? t.object.key() : t.subject.str(),
                           t.provenance.str());
  };
  std::sort(out.begin(), out.end(), [&](const Triple& a, const Triple& b) { return key(a) < key(b); });
  return out;
}

resolver::ResolutionResult resolve(const std::vector<Triple>& triples,
                                   const resolver::Description& d) {
  if (d.constraints.empty()) throw Error(ErrorCode::kInvalidDescription, "empty");
  // One scan: per subject, which constraints some triple satisfies.
  const std::vector<std::pair<Dcid, resolver::DescriptionValue>> cs(d.constraints.begin(),
                                                                   d.constraints.end());
  const auto name = d.constraints.find(Dcid("name"));
  struct Hits {
    std::vector<bool> met;
    bool exact = false;
  };
  std::map<Dcid, Hits> seen;
  for (const Triple& t : triples) {
    Hits& h = seen[t.subject];
    h.met.resize(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (t.predicate == cs[i].first && value_matches(cs[i].first, cs[i].second, t.object)) h.met[i] = true;
    if (name != d.constraints.end() && exact_name(t.predicate, name->second, t.object)) h.exact = true;
  }
  resolver::ResolutionResult out;
  for (const auto& [n, h] : seen) {
    if (std::find(h.met.begin(), h.met.end(), false) != h.met.end()) continue;
    out.candidates.push_back({n, name == d.constraints.end() || h.exact ? 1.0 : 0.9});
  }
  std::sort(out.candidates.begin(), out.candidates.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.dcid < b.dcid;
  });
  return out;
}

}  // namespace oracle

std::vector<Triple> sorted_unique(std::vector<Triple> triples) {
  std::sort(triples.begin(), triples.end(), kg::triple_less);
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  return triples;
}

std::string describe(const Triple& t) {
  return "(" + t.subject.str() + ", " + t.predicate.str() + ", " + t.object.key() + ", " +
         t.provenance.str() + ")";
}

// ---- topologies ------------------------------------------------------------

namespace {

api::Request make_request(const char* method, const std::string& target, const std::string& body,
                          const federation::RequestContext& ctx) {
  api::Request r;
  r.method = method;
  r.target = target;
  r.body = body;
  r.headers["x-dc-visited"] = ctx.visited_header();
  if (ctx.depth) r.headers["x-dc-depth"] = std::to_string(*ctx.depth);
  return r;
}

std::string send(const api::Service* service, bool down, const std::string& endpoint,
                 const api::Request& r) {
  if (down || !service) throw federation::BaseFailure(federation::kWarnBaseUnavailable, endpoint + " is down");
  api::Response res = service->handle(r);
  if (res.status != 200) {
    throw federation::BaseFailure(federation::kWarnBadResponse, "HTTP " + std::to_string(res.status));
  }
  return res.body;
}

}  // namespace

void PeerClient::stall_if_set() const {
  if (const int ms = stall_ms_.load(); ms > 0) {
    // Never reaches the service afterwards: the caller may be gone by then.
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    throw federation::BaseFailure(federation::kWarnTimeout, endpoint_ + " stalled");
  }
}

std::string PeerClient::get(const std::string& target, const federation::RequestContext& ctx) {
  ++calls_;
  stall_if_set();
  return send(service_, down_, endpoint_, make_request("GET", target, "", ctx));
}

std::string PeerClient::post(const std::string& target, const std::string& body,
                             const federation::RequestContext& ctx) {
  ++calls_;
  stall_if_set();
  return send(service_, down_, endpoint_, make_request("POST", target, body, ctx));
}

Topology::Topology(std::vector<std::unique_ptr<kg::Store>> stores,
                   const std::vector<std::vector<int>>& bases, int max_depth) {
  instances_.resize(stores.size());
  for (std::size_t i = 0; i < stores.size(); ++i) {
    Instance& inst = instances_[i];
    inst.id = "inst-" + std::to_string(i);
    inst.store = std::move(stores[i]);
    api::ServerConfig config;
    config.layer.instance_id = inst.id;
    config.layer.max_depth = max_depth;
    std::vector<std::shared_ptr<federation::BaseClient>> clients;
    for (int b : bases[i]) {
      const std::string url = "http://inst-" + std::to_string(b) + ".test";
      config.layer.bases.push_back({url, 5000});
      inst.clients.push_back(std::make_shared<PeerClient>(url));
      clients.push_back(inst.clients.back());
    }
    inst.service = std::make_unique<api::Service>(*inst.store, config, std::move(clients));
  }
  for (std::size_t i = 0; i < stores.size(); ++i)
    for (std::size_t k = 0; k < bases[i].size(); ++k)
      instances_[i].clients[k]->bind(instances_[bases[i][k]].service.get());
}

// ---- wire goldens ---------------------------------------------------------

std::vector<GoldenCase> golden_cases() {
  auto get = [](std::string target) { return api::Request{"GET", std::move(target), {}, ""}; };
  auto post = [](std::string target, std::string body) {
    return api::Request{"POST", std::move(target), {{"content-type", "application/json"}}, std::move(body)};
  };
  return {
      {"arcs_geo", get("/v1/node/country%2FGEO/arcs")},
      {"arcs_usa_in", get("/v1/node/country%2FUSA/arcs?direction=in")},
      {"triples_geo", get("/v1/node/country%2FGEO/triples")},
      {"triples_ca_name", get("/v1/node/geoId%2F06/triples?label=name")},
      {"resolve_georgia", post("/v1/resolve", R"({"description":{"name":"Georgia"}})")},
      {"resolve_georgia_country",
       post("/v1/resolve", R"({"description":{"name":"Georgia","typeOf":"Country"}})")},
      {"point_hrv_2019", get("/v1/observation/point?variable=dc%2Fvar%2FTotalPop&entity=country%2FHRV&date=2019")},
      {"point_hrv_latest", get("/v1/observation/point?variable=dc%2Fvar%2FTotalPop&entity=country%2FHRV")},
      {"point_missing", get("/v1/observation/point?variable=dc%2Fvar%2FTotalPop&entity=country%2FGEO&date=1990")},
      {"series_hrv", get("/v1/observation/series?variable=dc%2Fvar%2FTotalPop&entity=country%2FHRV")},
      {"collection_ca_income",
       get("/v1/observation/collection?variable=dc%2Fvar%2FMedianIncome&parent=geoId%2F06"
           "&childType=AdministrativeArea2&date=2020")},
      {"variables_ca", get("/v1/variables?entity=geoId%2F06")},
      {"info", get("/v1/info")},
      {"error_bad_date", get("/v1/observation/point?variable=dc%2Fvar%2FTotalPop&entity=country%2FHRV&date=20x9")},
      {"error_not_found", get("/v1/nothing")},
  };
}

std::string golden_path(const std::string& name) {
  return std::string(DC_GOLDEN_DIR) + "/" + name + ".json";
}

std::unique_ptr<kg::Store> golden_store() {
  auto s = std::make_unique<kg::Store>(":memory:");
  import_fixtures(*s, {"f1.dcnf"});
  return s;
}

api::ServerConfig golden_config() {
  api::ServerConfig c;
  c.layer.instance_id = "golden";
  return c;
}

}  // namespace dc::testing
