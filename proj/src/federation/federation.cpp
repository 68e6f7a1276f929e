#include "dc/federation/federation.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "dc/api/wire.hpp"
#include "dc/error.hpp"

namespace dc::federation {

namespace {

// Extra time granted past a base's own timeout before the fan-out gives up
// on a call that ignores it.
constexpr std::chrono::milliseconds kGrace{1000};

std::string q(const kg::Dcid& d) { return api::percent_encode(d.str()); }

std::string node_path(const kg::Dcid& node, std::string_view what) {
  return "/v1/node/" + q(node) + "/" + std::string(what);
}

std::string date_param(const stat::DateSelector& date) {
  return date ? "&date=" + date->str() : std::string();
}

std::string triple_identity(const kg::Triple& t) {
  return t.subject.str() + '\n' + t.predicate.str() + '\n' + t.object.key() + '\n' +
         t.provenance.str();
}

// For latest selection: the newest date wins, ties go to the lower layer.
bool newer(const stat::Observation& candidate, const stat::Observation& current) {
  return candidate.date > current.date;
}

}  // namespace

bool is_valid_endpoint(std::string_view url) {
  std::string_view rest;
  if (url.starts_with("http://")) {
    rest = url.substr(7);
  } else if (url.starts_with("https://")) {
    rest = url.substr(8);
  } else {
    return false;
  }
  const auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  if (authority.empty()) return false;
  std::string_view host = authority;
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    std::string_view port = authority.substr(colon + 1);
    host = authority.substr(0, colon);
    if (port.empty() || port.size() > 5) return false;
    for (char c : port)
      if (c < '0' || c > '9') return false;
  }
  if (host.empty()) return false;
  for (char c : host) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

void LayerConfig::validate() const {
  if (instance_id.empty()) throw Error(ErrorCode::kConfig, "instance_id must not be empty");
  if (instance_id.find_first_of(", \t\r\n") != std::string::npos)
    throw Error(ErrorCode::kConfig, "instance_id must not contain commas or whitespace");
  if (max_depth < 0) throw Error(ErrorCode::kConfig, "max_depth must be >= 0");
  for (const BaseEndpoint& b : bases) {
    if (!is_valid_endpoint(b.url)) throw Error(ErrorCode::kConfig, "invalid base URL '" + b.url + "'");
    if (b.timeout_ms <= 0) throw Error(ErrorCode::kConfig, "base timeout must be > 0 ms");
  }
}

RequestContext RequestContext::from_headers(std::string_view visited, std::string_view depth) {
  RequestContext ctx;
  std::size_t pos = 0;
  while (pos <= visited.size() && !visited.empty()) {
    auto comma = visited.find(',', pos);
    std::string_view id = visited.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!id.empty() && id.front() == ' ') id.remove_prefix(1);
    while (!id.empty() && id.back() == ' ') id.remove_suffix(1);
    if (!id.empty()) ctx.visited.emplace_back(id);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (!depth.empty()) {
    int d = 0;
    for (char c : depth) {
      if (c < '0' || c > '9' || d > 1000) {
        throw Error(ErrorCode::kBadRequest, "malformed " + std::string(kDepthHeader) + " header");
      }
      d = d * 10 + (c - '0');
    }
    ctx.depth = d;
  }
  return ctx;
}

std::string RequestContext::visited_header() const {
  std::string out;
  for (const auto& id : visited) {
    if (!out.empty()) out += ',';
    out += id;
  }
  return out;
}

GuardDecision loop_guard(const LayerConfig& config, const RequestContext& context) {
  GuardDecision d;
  if (std::find(context.visited.begin(), context.visited.end(), config.instance_id) !=
      context.visited.end()) {
    d.warning = Warning{std::string(kWarnLoopDetected), config.instance_id,
                        "instance already on the request path; answered locally"};
    return d;
  }
  const int depth = context.depth.value_or(config.max_depth);
  if (config.bases.empty()) return d;
  if (depth <= 0) {
    d.warning = Warning{std::string(kWarnDepthExceeded), config.instance_id,
                        "no federation depth remaining; answered locally"};
    return d;
  }
  d.consult_bases = true;
  d.outgoing.visited = context.visited;
  d.outgoing.visited.push_back(config.instance_id);
  d.outgoing.depth = depth - 1;
  return d;
}

Federator::Federator(const kg::Store& store, LayerConfig config,
                     std::vector<std::shared_ptr<BaseClient>> clients)
    : store_(store), config_(std::move(config)), clients_(std::move(clients)) {
  config_.validate();
  if (clients_.size() != config_.bases.size())
    throw Error(ErrorCode::kConfig, "one client per configured base is required");
}

template <class Call>
std::vector<Federator::Reply> Federator::fan_out(const RequestContext& outgoing, Call call) const {
  struct Slot {
    std::mutex m;
    std::condition_variable cv;
    bool done = false;
    Reply reply;
  };
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::shared_ptr<Slot>> slots;
  for (const auto& client : clients_) {
    auto slot = std::make_shared<Slot>();
    slots.push_back(slot);
    // Detached so a base that ignores its timeout cannot hold the request.
    std::thread([slot, client, outgoing, call] {
      Reply r;
      try {
        r.body = call(*client, outgoing);
      } catch (const BaseFailure& e) {
        r.failure = Warning{e.code(), client->endpoint(), e.what()};
      } catch (const std::exception& e) {
        r.failure = Warning{std::string(kWarnBaseUnavailable), client->endpoint(), e.what()};
      }
      std::lock_guard lock(slot->m);
      slot->reply = std::move(r);
      slot->done = true;
      slot->cv.notify_all();
    }).detach();
  }
  std::vector<Reply> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto deadline = start + std::chrono::milliseconds(clients_[i]->timeout_ms()) + kGrace;
    std::unique_lock lock(slots[i]->m);
    if (slots[i]->cv.wait_until(lock, deadline, [&] { return slots[i]->done; })) {
      out.push_back(std::move(slots[i]->reply));
    } else {
      out.push_back({std::nullopt, Warning{std::string(kWarnTimeout), clients_[i]->endpoint(),
                                           "no response within " +
                                               std::to_string(clients_[i]->timeout_ms()) + " ms"}});
    }
  }
  return out;
}

template <class T, class Call>
std::vector<std::optional<T>> Federator::gather(const GuardDecision& guard,
                                                std::vector<Warning>& warnings, Call call) const {
  if (guard.warning) warnings.push_back(*guard.warning);
  std::vector<std::optional<T>> out;
  if (!guard.consult_bases) return out;
  for (Reply& reply : fan_out(guard.outgoing, call)) {
    if (reply.failure) {
      warnings.push_back(std::move(*reply.failure));
      out.emplace_back();
      continue;
    }
    try {
      T value = api::from_json<T>(api::decode(*reply.body));
      for (Warning& w : value.warnings) warnings.push_back(std::move(w));
      value.warnings.clear();
      out.emplace_back(std::move(value));
    } catch (const Error& e) {
      warnings.push_back(Warning{std::string(kWarnBadResponse),
                                 clients_[out.size()]->endpoint(), e.what()});
      out.emplace_back();
    }
  }
  return out;
}

ArcsResult Federator::arcs(const kg::Dcid& node, kg::Direction direction,
                           const RequestContext& context) const {
  ArcsResult r;
  const std::string target =
      node_path(node, "arcs") + "?direction=" + std::string(kg::to_string(direction));
  auto bases = gather<ArcsResult>(loop_guard(config_, context), r.warnings,
                                  [target](BaseClient& c, const RequestContext& ctx) {
                                    return c.get(target, ctx);
                                  });
  std::set<kg::Dcid> labels;
  for (auto& l : store_.arc_labels(node, direction)) labels.insert(std::move(l));
  for (auto& b : bases)
    if (b) labels.insert(b->labels.begin(), b->labels.end());
  r.labels.assign(labels.begin(), labels.end());
  return r;
}

TriplesResult Federator::triples(const kg::Dcid& node, const std::optional<kg::Dcid>& label,
                                 kg::Direction direction,
                                 const std::optional<kg::Dcid>& provenance,
                                 const RequestContext& context) const {
  TriplesResult r;
  std::string target =
      node_path(node, "triples") + "?direction=" + std::string(kg::to_string(direction));
  if (label) target += "&label=" + q(*label);
  if (provenance) target += "&provenance=" + q(*provenance);
  auto bases = gather<TriplesResult>(loop_guard(config_, context), r.warnings,
                                     [target](BaseClient& c, const RequestContext& ctx) {
                                       return c.get(target, ctx);
                                     });
  std::vector<kg::Triple> local;
  if (label) {
    local = store_.neighbors(node, *label, direction, provenance);
  } else {
    for (kg::Triple& t : store_.node_triples(node, direction))
      if (!provenance || t.provenance == *provenance) local.push_back(std::move(t));
  }
  std::set<std::string> seen;
  auto add = [&](kg::Triple t, int origin) {
    if (!seen.insert(triple_identity(t)).second) return;
    r.triples.push_back(std::move(t));
    r.origins.push_back(origin);
  };
  for (kg::Triple& t : local) add(std::move(t), 0);
  for (std::size_t i = 0; i < bases.size(); ++i)
    if (bases[i])
      for (kg::Triple& t : bases[i]->triples) add(std::move(t), static_cast<int>(i) + 1);
  return r;
}

ResolveResult Federator::resolve(const resolver::Description& description,
                                 const RequestContext& context) const {
  ResolveResult r;
  // Validate before any base is asked.
  const resolver::ResolutionResult local = resolver::resolve(description, store_);
  const std::string body = api::encode(api::Json{{"description", api::to_json(description)}});
  auto bases = gather<ResolveResult>(loop_guard(config_, context), r.warnings,
                                     [body](BaseClient& c, const RequestContext& ctx) {
                                       return c.post("/v1/resolve", body, ctx);
                                     });
  std::set<kg::Dcid> seen;
  for (const auto& c : local.candidates) {
    seen.insert(c.dcid);
    r.candidates.push_back(c);
    r.origins.push_back(0);
  }
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (!bases[i]) continue;
    for (auto& c : bases[i]->candidates) {
      if (!seen.insert(c.dcid).second) continue;
      r.candidates.push_back(std::move(c));
      r.origins.push_back(static_cast<int>(i) + 1);
    }
  }
  return r;
}

PointResult Federator::point(const kg::Dcid& variable, const kg::Dcid& entity,
                             const stat::DateSelector& date, const RequestContext& context) const {
  PointResult r;
  const std::string target = "/v1/observation/point?variable=" + q(variable) +
                             "&entity=" + q(entity) + date_param(date);
  auto bases = gather<PointResult>(loop_guard(config_, context), r.warnings,
                                   [target](BaseClient& c, const RequestContext& ctx) {
                                     return c.get(target, ctx);
                                   });
  r.observation = stat::get_point(store_, variable, entity, date);
  r.origin = 0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (!bases[i] || !bases[i]->observation) continue;
    if (!r.observation || (!date && newer(*bases[i]->observation, *r.observation))) {
      r.observation = std::move(bases[i]->observation);
      r.origin = static_cast<int>(i) + 1;
    }
  }
  if (!r.observation) r.origin = 0;
  return r;
}

SeriesResult Federator::series(const kg::Dcid& variable, const kg::Dcid& entity,
                               const std::optional<kg::PartialDate>& start,
                               const std::optional<kg::PartialDate>& end,
                               const RequestContext& context) const {
  SeriesResult r;
  // Range errors surface before any base is asked.
  stat::Series local = stat::get_series(store_, variable, entity, start, end);
  std::string target = "/v1/observation/series?variable=" + q(variable) + "&entity=" + q(entity);
  if (start) target += "&start=" + start->str();
  if (end) target += "&end=" + end->str();
  auto bases = gather<SeriesResult>(loop_guard(config_, context), r.warnings,
                                    [target](BaseClient& c, const RequestContext& ctx) {
                                      return c.get(target, ctx);
                                    });
  std::map<kg::PartialDate, std::pair<stat::SeriesPoint, int>> merged;
  for (auto& p : local.points) merged.emplace(p.date, std::make_pair(p, 0));
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (!bases[i]) continue;
    for (auto& p : bases[i]->series.points)
      merged.emplace(p.date, std::make_pair(p, static_cast<int>(i) + 1));
  }
  r.series.variable = variable;
  r.series.entity = entity;
  for (auto& [d, entry] : merged) {
    r.series.points.push_back(std::move(entry.first));
    r.origins.push_back(entry.second);
  }
  return r;
}

CollectionResult Federator::collection(const kg::Dcid& variable, const kg::Dcid& parent,
                                       const kg::Dcid& child_type, const stat::DateSelector& date,
                                       const RequestContext& context) const {
  CollectionResult r;
  const std::string target = "/v1/observation/collection?variable=" + q(variable) +
                             "&parent=" + q(parent) + "&childType=" + q(child_type) +
                             date_param(date);
  auto bases = gather<CollectionResult>(loop_guard(config_, context), r.warnings,
                                        [target](BaseClient& c, const RequestContext& ctx) {
                                          return c.get(target, ctx);
                                        });
  std::set<kg::Dcid> children;
  for (auto& c : store_.contained_children(parent, child_type)) children.insert(std::move(c));
  for (auto& b : bases)
    if (b) children.insert(b->children.begin(), b->children.end());
  const std::vector<kg::Dcid> all(children.begin(), children.end());

  std::map<kg::Dcid, std::pair<stat::Observation, int>> merged;
  for (auto& row : stat::get_rows(store_, variable, all, date))
    merged.emplace(row.entity, std::make_pair(std::move(row.observation), 0));
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (!bases[i]) continue;
    for (auto& row : bases[i]->rows) {
      const int origin = static_cast<int>(i) + 1;
      auto [it, inserted] =
          merged.emplace(row.entity, std::make_pair(row.observation, origin));
      if (!inserted && !date && newer(row.observation, it->second.first))
        it->second = {std::move(row.observation), origin};
    }
  }
  for (auto& [entity, entry] : merged) {
    r.rows.push_back({entity, std::move(entry.first)});
    r.origins.push_back(entry.second);
  }
  r.children = all;
  return r;
}

VariablesResult Federator::variables(const kg::Dcid& entity, const RequestContext& context) const {
  VariablesResult r;
  const std::string target = "/v1/variables?entity=" + q(entity);
  auto bases = gather<VariablesResult>(loop_guard(config_, context), r.warnings,
                                       [target](BaseClient& c, const RequestContext& ctx) {
                                         return c.get(target, ctx);
                                       });
  std::map<kg::Dcid, int> merged;
  for (auto& v : stat::list_variables(store_, entity)) merged.emplace(std::move(v), 0);
  for (std::size_t i = 0; i < bases.size(); ++i)
    if (bases[i])
      for (auto& v : bases[i]->variables) merged.emplace(std::move(v), static_cast<int>(i) + 1);
  for (auto& [v, origin] : merged) {
    r.variables.push_back(v);
    r.origins.push_back(origin);
  }
  return r;
}

InfoResult Federator::info() const {
  return {config_.instance_id, config_.bases, config_.max_depth, store_.triple_count()};
}

}  // namespace dc::federation
