// dc: run a server, import data, and query any instance over the wire API.
//
// Exit codes: 0 ok, 1 bad server config, 2 import stage failure,
// 3 transport failure, 4 HTTP error status from the queried instance.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "dc/api/config.hpp"
#include "dc/api/server.hpp"
#include "dc/api/wire.hpp"
#include "dc/error.hpp"
#include "dc/federation/http_base.hpp"
#include "dc/ingest/pipeline.hpp"
#include "dc/schema/vocabulary.hpp"

namespace {

using namespace dc;

constexpr int kExitConfig = 1;
constexpr int kExitStage = 2;
constexpr int kExitTransport = 3;
constexpr int kExitHttp = 4;

struct HttpReply {
  int status = 0;
  std::string body;
};

class TransportError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

HttpReply http_call(const std::string& endpoint, const std::string& method,
                    const std::string& target, const std::string& body = {},
                    const httplib::Headers& headers = {}) {
  if (!federation::is_valid_endpoint(endpoint)) throw TransportError("invalid endpoint '" + endpoint + "'");
  const auto scheme_end = endpoint.find("://") + 3;
  const auto path_start = endpoint.find('/', scheme_end);
  std::string prefix = path_start == std::string::npos ? "" : endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  httplib::Client client(endpoint.substr(0, path_start));
  client.set_url_encode(false);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(std::chrono::seconds(300));
  auto res = method == "GET" ? client.Get(prefix + target, headers)
                             : client.Post(prefix + target, headers, body, "application/json");
  if (!res) throw TransportError(endpoint + ": " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

// Prints the body verbatim; the CLI adds nothing to wire payloads.
int emit(const HttpReply& reply) {
  std::fwrite(reply.body.data(), 1, reply.body.size(), stdout);
  std::fflush(stdout);
  return reply.status >= 200 && reply.status < 300 ? 0 : kExitHttp;
}

std::string q(const std::string& s) { return api::percent_encode(s); }

void print_report(const ingest::ImportReport& r, bool json) {
  if (json) {
    std::cout << api::encode(api::to_json(r)) << "\n";
    return;
  }
  std::cout << "triples added: " << r.triples_added << "\n"
            << "observations added: " << r.observations_added << "\n"
            << "rows skipped: " << r.rows_skipped.size() << "\n";
  for (const auto& s : r.rows_skipped) std::cout << "  row " << s.row << ": " << s.reason << "\n";
  std::cout << "parse errors: " << r.parse_errors.size() << "\n";
  for (const auto& e : r.parse_errors)
    std::cout << "  " << e.source << ":" << e.error.line << ": " << e.error.reason << "\n";
  std::cout << "violations: " << r.violations.size() << "\n";
  for (const auto& v : r.violations) {
    std::cout << "  " << schema::to_string(v.kind) << " " << v.subject.str();
    if (v.predicate) std::cout << " " << v.predicate->str();
    std::cout << ": " << v.detail << "\n";
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

api::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical knowledge graph server and client"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the API server");
  std::string config_path, listen, store_override;
  std::vector<std::string> extra_bases;
  serve->add_option("--config", config_path, "TOML config file");
  serve->add_option("--listen", listen, "host:port to listen on");
  serve->add_option("--store", store_override, "store file");
  serve->add_option("--base", extra_bases, "base instance URL (repeatable)");

  // import
  auto* import = app.add_subcommand("import", "Import node files or a CSV");
  import->require_subcommand(1);
  std::string store_path, endpoint, token, template_path;
  bool json = false;
  std::vector<std::string> files;
  auto add_import_target = [&](CLI::App* cmd) {
    auto* store = cmd->add_option("--store", store_path, "import offline into this store file");
    auto* ep = cmd->add_option("--endpoint", endpoint, "import through a running instance");
    ep->envname("DC_ENDPOINT");
    store->excludes(ep);
    cmd->add_option("--token", token, "admin token for --endpoint")->envname("DC_ADMIN_TOKEN");
    cmd->add_flag("--json", json, "print the report as JSON");
  };
  auto* import_nodes = import->add_subcommand("nodes", "Import DCNF node files");
  import_nodes->add_option("files", files, "node files")->required();
  add_import_target(import_nodes);
  auto* import_csv = import->add_subcommand("csv", "Import a CSV with a template");
  import_csv->add_option("file", files, "CSV file")->required()->expected(1);
  import_csv->add_option("--template", template_path, "TOML template")->required();
  add_import_target(import_csv);

  // query
  auto* query = app.add_subcommand("query", "Query an instance; prints the raw response");
  query->require_subcommand(1);
  std::string q_endpoint = "http://127.0.0.1:8080";
  query->add_option("--endpoint", q_endpoint, "instance URL")->envname("DC_ENDPOINT");
  std::string dcid, direction = "out", label, provenance, name, type, variable, entity, date,
                    start, end, parent, child_type;
  std::vector<std::string> properties;
  auto* q_arcs = query->add_subcommand("arcs", "Arc labels of a node");
  q_arcs->add_option("--dcid", dcid)->required();
  q_arcs->add_option("--direction", direction)->check(CLI::IsMember({"out", "in"}));
  auto* q_triples = query->add_subcommand("triples", "Triples of a node");
  q_triples->add_option("--dcid", dcid)->required();
  q_triples->add_option("--direction", direction)->check(CLI::IsMember({"out", "in"}));
  q_triples->add_option("--label", label);
  q_triples->add_option("--provenance", provenance);
  auto* q_resolve = query->add_subcommand("resolve", "Resolve an entity by description");
  q_resolve->add_option("--name", name);
  q_resolve->add_option("--type", type);
  q_resolve->add_option("--property", properties, "extra constraint prop=value (repeatable)");
  auto* q_point = query->add_subcommand("point", "One observation");
  q_point->add_option("--variable", variable)->required();
  q_point->add_option("--entity", entity)->required();
  q_point->add_option("--date", date, "YYYY[-MM[-DD]]; latest when omitted");
  auto* q_series = query->add_subcommand("series", "Observation time series");
  q_series->add_option("--variable", variable)->required();
  q_series->add_option("--entity", entity)->required();
  q_series->add_option("--start", start);
  q_series->add_option("--end", end);
  auto* q_collection = query->add_subcommand("collection", "Observations across child places");
  q_collection->add_option("--variable", variable)->required();
  q_collection->add_option("--parent", parent)->required();
  q_collection->add_option("--child-type", child_type)->required();
  q_collection->add_option("--date", date);
  auto* q_variables = query->add_subcommand("variables", "Variables observed for an entity");
  q_variables->add_option("--entity", entity)->required();
  auto* q_info = query->add_subcommand("info", "Instance metadata");

  for (CLI::App* sub : query->get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (serve->parsed()) {
    api::ServerConfig config;
    try {
      if (!config_path.empty()) config = api::load_config(config_path);
      api::apply_env_overrides(config);
      if (!listen.empty()) config.listen = listen;
      if (!store_override.empty()) config.store_path = store_override;
      for (const auto& b : extra_bases) config.layer.bases.push_back({b, 5000});
      api::finalize(config);
    } catch (const std::exception& e) {
      std::cerr << "dc serve: " << e.what() << "\n";
      return kExitConfig;
    }
    try {
      kg::Store store(config.store_path);
      schema::ensure_core_vocabulary(store);
      api::Service service(store, config, federation::make_http_clients(config.layer));
      api::HttpServer server(service);
      const api::ListenAddress addr = api::parse_listen(config.listen);
      const int port = server.bind(addr);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "dc serve: instance " << config.layer.instance_id << " listening on http://"
                << addr.host << ":" << port << " (" << config.layer.bases.size() << " bases)"
                << std::endl;
      server.run();
      g_server = nullptr;
    } catch (const std::exception& e) {
      std::cerr << "dc serve: " << e.what() << "\n";
      return kExitConfig;
    }
    return 0;
  }

  if (import->parsed()) {
    const bool csv = import_csv->parsed();
    if (store_path.empty() && endpoint.empty()) {
      std::cerr << "dc import: one of --store or --endpoint is required\n";
      return kExitStage;
    }
    try {
      if (!store_path.empty()) {
        kg::Store store(store_path);
        std::vector<std::filesystem::path> paths(files.begin(), files.end());
        std::optional<std::filesystem::path> tmpl;
        if (csv) tmpl = template_path;
        auto sources = ingest::load_sources(paths, tmpl);
        print_report(ingest::import_and_validate(store, sources), json);
        return 0;
      }
      ingest::ImportReport total;
      for (const auto& file : files) {
        api::Json body{{"kind", csv ? "csv" : "nodes"}, {"name", file}, {"content", read_text(file)}};
        if (csv) body["template"] = read_text(template_path);
        httplib::Headers headers{{"Authorization", "Bearer " + token}};
        HttpReply reply = http_call(endpoint, "POST", "/v1/admin/import", api::encode(body), headers);
        if (reply.status != 200) {
          std::cerr << "dc import: " << file << ": HTTP " << reply.status << " " << reply.body << "\n";
          return kExitStage;
        }
        auto part = api::from_json<ingest::ImportReport>(api::decode(reply.body));
        total.triples_added += part.triples_added;
        total.observations_added += part.observations_added;
        total.rows_skipped.insert(total.rows_skipped.end(), part.rows_skipped.begin(),
                                  part.rows_skipped.end());
        total.parse_errors.insert(total.parse_errors.end(), part.parse_errors.begin(),
                                  part.parse_errors.end());
        total.violations = part.violations;
      }
      print_report(total, json);
      return 0;
    } catch (const TransportError& e) {
      std::cerr << "dc import: " << e.what() << "\n";
      return kExitTransport;
    } catch (const std::exception& e) {
      std::cerr << "dc import: " << e.what() << "\n";
      return kExitStage;
    }
  }

  try {
    if (q_arcs->parsed())
      return emit(http_call(q_endpoint, "GET", "/v1/node/" + q(dcid) + "/arcs?direction=" + direction));
    if (q_triples->parsed()) {
      std::string target = "/v1/node/" + q(dcid) + "/triples?direction=" + direction;
      if (!label.empty()) target += "&label=" + q(label);
      if (!provenance.empty()) target += "&provenance=" + q(provenance);
      return emit(http_call(q_endpoint, "GET", target));
    }
    if (q_resolve->parsed()) {
      api::Json description = api::Json::object();
      if (!name.empty()) description["name"] = name;
      if (!type.empty()) description["typeOf"] = type;
      for (const auto& p : properties) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) {
          std::cerr << "dc query resolve: --property expects prop=value\n";
          return kExitStage;
        }
        description[p.substr(0, eq)] = p.substr(eq + 1);
      }
      return emit(http_call(q_endpoint, "POST", "/v1/resolve",
                            api::encode(api::Json{{"description", description}})));
    }
    if (q_point->parsed()) {
      std::string target = "/v1/observation/point?variable=" + q(variable) + "&entity=" + q(entity);
      if (!date.empty()) target += "&date=" + q(date);
      return emit(http_call(q_endpoint, "GET", target));
    }
    if (q_series->parsed()) {
      std::string target = "/v1/observation/series?variable=" + q(variable) + "&entity=" + q(entity);
      if (!start.empty()) target += "&start=" + q(start);
      if (!end.empty()) target += "&end=" + q(end);
      return emit(http_call(q_endpoint, "GET", target));
    }
    if (q_collection->parsed()) {
      std::string target = "/v1/observation/collection?variable=" + q(variable) +
                           "&parent=" + q(parent) + "&childType=" + q(child_type);
      if (!date.empty()) target += "&date=" + q(date);
      return emit(http_call(q_endpoint, "GET", target));
    }
    if (q_variables->parsed())
      return emit(http_call(q_endpoint, "GET", "/v1/variables?entity=" + q(entity)));
    if (q_info->parsed()) return emit(http_call(q_endpoint, "GET", "/v1/info"));
  } catch (const TransportError& e) {
    std::cerr << "dc query: " << e.what() << "\n";
    return kExitTransport;
  }
  return 0;
}
