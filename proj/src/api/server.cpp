#include "dc/api/server.hpp"

#include <algorithm>

#include <httplib.h>

#include "dc/api/wire.hpp"
#include "dc/error.hpp"
#include "dc/kg/terms.hpp"

namespace dc::api {

namespace {

using federation::RequestContext;

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status(status), code(std::move(code)) {}
  int status;
  std::string code;
};

[[noreturn]] void bad_request(const std::string& message) {
  throw HttpError(400, std::string(to_string(ErrorCode::kBadRequest)), message);
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kUnauthorized: return 401;
    case ErrorCode::kForbidden: return 403;
    case ErrorCode::kProvenanceConflict: return 409;
    case ErrorCode::kStorage:
    case ErrorCode::kIo:
    case ErrorCode::kConfig:
    case ErrorCode::kTransport: return 500;
    default: return 400;
  }
}

Response json_response(const Json& j, int status = 200) { return {status, encode(j)}; }

Response error_response(int status, std::string_view code, std::string_view message) {
  return {status, encode(error_body(code, message))};
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string percent_decode(std::string_view s, bool plus_is_space) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      if (i + 2 >= s.size()) bad_request("truncated percent escape");
      const int hi = hex_value(s[i + 1]);
      const int lo = hex_value(s[i + 2]);
      if (hi < 0 || lo < 0) bad_request("malformed percent escape");
      out += static_cast<char>(hi * 16 + lo);
      i += 2;
    } else if (plus_is_space && s[i] == '+') {
      out += ' ';
    } else {
      out += s[i];
    }
  }
  return out;
}

struct Target {
  std::string path;  // still percent-encoded
  std::map<std::string, std::string> query;
};

Target split_target(const std::string& target) {
  Target t;
  const auto qpos = target.find('?');
  t.path = target.substr(0, qpos);
  if (qpos == std::string::npos) return t;
  std::string_view rest = std::string_view(target).substr(qpos + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    std::string_view pair = rest.substr(0, amp);
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      std::string key = percent_decode(pair.substr(0, eq), true);
      std::string value =
          eq == std::string_view::npos ? std::string() : percent_decode(pair.substr(eq + 1), true);
      if (!t.query.emplace(std::move(key), std::move(value)).second)
        bad_request("repeated query parameter");
    }
    if (amp == std::string_view::npos) break;
    rest.remove_prefix(amp + 1);
  }
  return t;
}

std::optional<std::string> param(const Target& t, const std::string& name) {
  auto it = t.query.find(name);
  if (it == t.query.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

kg::Dcid dcid_from(const std::string& text, const std::string& what) {
  if (!kg::Dcid::is_valid(text)) {
    throw HttpError(400, std::string(to_string(ErrorCode::kMalformedDcid)),
                    what + " is not a valid dcid: '" + text + "'");
  }
  return kg::Dcid(text);
}

kg::Dcid required_dcid(const Target& t, const std::string& name) {
  auto v = param(t, name);
  if (!v) bad_request("missing query parameter '" + name + "'");
  return dcid_from(*v, name);
}

std::optional<kg::Dcid> optional_dcid(const Target& t, const std::string& name) {
  auto v = param(t, name);
  if (!v) return std::nullopt;
  return dcid_from(*v, name);
}

std::optional<kg::PartialDate> optional_date(const Target& t, const std::string& name) {
  auto v = param(t, name);
  if (!v || *v == "latest") return std::nullopt;
  auto d = kg::PartialDate::try_parse(*v);
  if (!d) bad_request(name + " is not a date: '" + *v + "'");
  return d;
}

kg::Direction direction(const Target& t) {
  auto v = param(t, "direction");
  if (!v) return kg::Direction::kOut;
  auto d = kg::parse_direction(*v);
  if (!d) bad_request("direction must be 'out' or 'in'");
  return *d;
}

void allow(const Request& r, const char* method) {
  if (r.method != method) {
    throw HttpError(405, "MethodNotAllowed", r.method + " not allowed on this route");
  }
}

std::string header(const Request& r, const std::string& lower_name) {
  auto it = r.headers.find(lower_name);
  return it == r.headers.end() ? std::string() : it->second;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Json parse_body(const Request& r) {
  try {
    return decode(r.body);
  } catch (const DecodeError& e) {
    throw HttpError(400, std::string(to_string(ErrorCode::kDecode)),
                    "invalid JSON at byte " + std::to_string(e.offset()));
  }
}

}  // namespace

Service::Service(kg::Store& store, ServerConfig config,
                 std::vector<std::shared_ptr<federation::BaseClient>> clients)
    : store_(store), config_(std::move(config)), federator_(store, config_.layer, std::move(clients)) {}

Response Service::handle(const Request& request) const {
  try {
    return route(request);
  } catch (const HttpError& e) {
    return error_response(e.status, e.code, e.what());
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

Response Service::route(const Request& request) const {
  const Target t = split_target(request.target);
  const RequestContext ctx = RequestContext::from_headers(
      header(request, lower(federation::kVisitedHeader)),
      header(request, lower(federation::kDepthHeader)));
  const std::string& path = t.path;

  constexpr std::string_view kNode = "/v1/node/";
  if (path.starts_with(kNode)) {
    std::string_view rest = std::string_view(path).substr(kNode.size());
    const auto slash = rest.rfind('/');
    if (slash != std::string_view::npos && slash > 0) {
      const std::string_view op = rest.substr(slash + 1);
      const kg::Dcid node = dcid_from(percent_decode(rest.substr(0, slash), false), "node");
      if (op == "arcs") {
        allow(request, "GET");
        return json_response(to_json(federator_.arcs(node, direction(t), ctx)));
      }
      if (op == "triples") {
        allow(request, "GET");
        return json_response(to_json(federator_.triples(node, optional_dcid(t, "label"),
                                                        direction(t),
                                                        optional_dcid(t, "provenance"), ctx)));
      }
    }
  } else if (path == "/v1/resolve") {
    allow(request, "POST");
    const Json body = parse_body(request);
    if (!body.is_object() || !body.contains("description"))
      bad_request("body must be {\"description\": {...}}");
    auto description = from_json<resolver::Description>(body["description"]);
    return json_response(to_json(federator_.resolve(description, ctx)));
  } else if (path == "/v1/observation/point") {
    allow(request, "GET");
    return json_response(to_json(federator_.point(required_dcid(t, "variable"),
                                                  required_dcid(t, "entity"),
                                                  optional_date(t, "date"), ctx)));
  } else if (path == "/v1/observation/series") {
    allow(request, "GET");
    return json_response(to_json(federator_.series(required_dcid(t, "variable"),
                                                   required_dcid(t, "entity"),
                                                   optional_date(t, "start"),
                                                   optional_date(t, "end"), ctx)));
  } else if (path == "/v1/observation/collection") {
    allow(request, "GET");
    return json_response(to_json(federator_.collection(
        required_dcid(t, "variable"), required_dcid(t, "parent"), required_dcid(t, "childType"),
        optional_date(t, "date"), ctx)));
  } else if (path == "/v1/variables") {
    allow(request, "GET");
    return json_response(to_json(federator_.variables(required_dcid(t, "entity"), ctx)));
  } else if (path == "/v1/info") {
    allow(request, "GET");
    return json_response(to_json(federator_.info()));
  } else if (path == "/v1/admin/import") {
    allow(request, "POST");
    return admin_import(request);
  }
  return error_response(404, to_string(ErrorCode::kNotFound), "no route for " + path);
}

Response Service::admin_import(const Request& request) const {
  if (!config_.admin_token) {
    throw Error(ErrorCode::kForbidden, "admin import is disabled on this instance");
  }
  if (header(request, "authorization") != "Bearer " + *config_.admin_token) {
    throw Error(ErrorCode::kUnauthorized, "missing or wrong admin token");
  }
  const Json body = parse_body(request);
  if (!body.is_object()) bad_request("body must be an object");
  auto text = [&](const char* key) -> std::optional<std::string> {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) bad_request(std::string("'") + key + "' must be a string");
    return it->get<std::string>();
  };
  ingest::ImportSource source;
  source.name = text("name").value_or("request");
  auto kind = text("kind");
  auto content = text("content");
  if (!kind || !content) bad_request("'kind' and 'content' are required");
  source.content = *content;
  if (*kind == "csv") {
    auto tmpl = text("template");
    if (!tmpl) bad_request("csv import needs 'template'");
    source.kind = ingest::SourceKind::kCsv;
    source.csv_template = ingest::parse_template(*tmpl);
  } else if (*kind != "nodes") {
    bad_request("kind must be 'nodes' or 'csv'");
  }

  ingest::ImportContext context;
  context.resolve = [this](const resolver::Description& d) {
    resolver::ResolutionResult r;
    r.candidates = federator_.resolve(d).candidates;
    // Keep the resolver's order contract across layers.
    std::stable_sort(r.candidates.begin(), r.candidates.end(),
                     [](const auto& a, const auto& b) {
                       return a.score != b.score ? a.score > b.score : a.dcid < b.dcid;
                     });
    return r;
  };
  context.is_stat_var = [this](const kg::Dcid& variable) {
    auto r = federator_.triples(variable, terms::id(terms::kTypeOf), kg::Direction::kOut,
                                std::nullopt);
    return std::any_of(r.triples.begin(), r.triples.end(), [](const kg::Triple& t) {
      const kg::Dcid* c = t.object.as_ref();
      return c && c->str() == terms::kStatisticalVariable;
    });
  };

  std::lock_guard lock(import_mutex_);
  const ingest::ImportSource sources[] = {std::move(source)};
  return json_response(to_json(ingest::import_and_validate(store_, sources, context)));
}

std::string InProcessClient::get(const std::string& target,
                                 const federation::RequestContext& context) {
  return call("GET", target, std::string(), context);
}

std::string InProcessClient::post(const std::string& target, const std::string& body,
                                  const federation::RequestContext& context) {
  return call("POST", target, body, context);
}

std::string InProcessClient::call(const char* method, const std::string& target,
                                  const std::string& body,
                                  const federation::RequestContext& context) {
  Request r;
  r.method = method;
  r.target = target;
  r.body = body;
  r.headers[lower(federation::kVisitedHeader)] = context.visited_header();
  if (context.depth) r.headers[lower(federation::kDepthHeader)] = std::to_string(*context.depth);
  Response res = service_.handle(r);
  if (res.status < 200 || res.status >= 300) {
    throw federation::BaseFailure(federation::kWarnBadResponse, "HTTP " + std::to_string(res.status));
  }
  return std::move(res.body);
}

HttpServer::HttpServer(const Service& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  // No SO_REUSEPORT: a second server on a taken port must fail to bind
  // instead of silently sharing connections.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  // Routing happens in Service; httplib only reads the request.
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.target = req.target;
    r.body = req.body;
    for (const auto& [name, value] : req.headers) r.headers[lower(name)] = value;
    Response out = service_.handle(r);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  const std::string any = ".*";
  server_->Get(any, handler);
  server_->Post(any, handler);
  server_->Put(any, handler);
  server_->Delete(any, handler);
  server_->Patch(any, handler);
}

HttpServer::~HttpServer() {
  // httplib only closes a bound socket from a running server.
  if (bound_ && !ran_) start();
  stop();
}

int HttpServer::bind(const ListenAddress& address) {
  int port = address.port;
  if (port == 0) {
    port = server_->bind_to_any_port(address.host);
  } else if (!server_->bind_to_port(address.host, port)) {
    port = -1;
  }
  if (port <= 0) {
    throw Error(ErrorCode::kConfig,
                "cannot bind " + address.host + ":" + std::to_string(address.port));
  }
  bound_ = true;
  return port;
}

void HttpServer::run() {
  ran_ = true;
  server_->listen_after_bind();
}

void HttpServer::start() {
  thread_ = std::thread([this] { run(); });
  server_->wait_until_ready();
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace dc::api
