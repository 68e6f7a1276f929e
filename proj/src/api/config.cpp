#include "dc/api/config.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "dc/error.hpp"

namespace dc::api {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kConfig, what); }

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  if (text.empty() || text.size() > 9) invalid(std::string(what) + " must be an integer");
  for (char c : text) {
    if (c < '0' || c > '9') invalid(std::string(what) + " must be an integer");
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

ServerConfig parse_config(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    invalid("config syntax: " + std::string(e.description()) + " at line " +
            std::to_string(e.source().begin.line));
  }
  static const std::set<std::string> kKeys = {"instance_id", "store",     "listen",
                                              "admin_token", "max_depth", "bases"};
  for (const auto& [key, value] : root)
    if (!kKeys.count(std::string(key.str()))) invalid("unknown config key '" + std::string(key.str()) + "'");

  ServerConfig c;
  auto text = [&](const char* key) -> std::optional<std::string> {
    auto node = root[key];
    if (!node) return std::nullopt;
    auto v = node.value<std::string>();
    if (!v) invalid(std::string(key) + " must be a string");
    return v;
  };
  if (auto v = text("instance_id")) c.layer.instance_id = *v;
  if (auto v = text("store")) c.store_path = *v;
  if (auto v = text("listen")) c.listen = *v;
  if (auto v = text("admin_token")) c.admin_token = *v;
  if (auto node = root["max_depth"]) {
    auto v = node.value<std::int64_t>();
    if (!v || !node.is_integer() || *v < 0 || *v > 64) invalid("max_depth must be an integer in [0, 64]");
    c.layer.max_depth = static_cast<int>(*v);
  }
  if (auto node = root["bases"]) {
    const toml::array* bases = node.as_array();
    if (!bases) invalid("bases must be an array of tables");
    for (const auto& entry : *bases) {
      const toml::table* t = entry.as_table();
      if (!t) invalid("bases must be an array of tables");
      federation::BaseEndpoint b;
      auto endpoint = (*t)["endpoint"].value<std::string>();
      if (!endpoint) invalid("bases.endpoint is required");
      b.url = *endpoint;
      if (auto timeout = (*t)["timeout_ms"]) {
        auto v = timeout.value<std::int64_t>();
        if (!v || *v <= 0 || *v > 3'600'000) invalid("bases.timeout_ms must be a positive integer");
        b.timeout_ms = static_cast<int>(*v);
      }
      c.layer.bases.push_back(std::move(b));
    }
  }
  return c;
}

ServerConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_env_overrides(ServerConfig& config, const EnvLookup& lookup) {
  EnvLookup get = lookup ? lookup : [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    return v ? std::optional<std::string>(v) : std::nullopt;
  };
  if (auto v = get("DC_INSTANCE_ID")) config.layer.instance_id = *v;
  if (auto v = get("DC_STORE")) config.store_path = *v;
  if (auto v = get("DC_LISTEN")) config.listen = *v;
  if (auto v = get("DC_ADMIN_TOKEN")) config.admin_token = *v;
  if (auto v = get("DC_MAX_DEPTH")) config.layer.max_depth = parse_int(*v, "DC_MAX_DEPTH");
  if (auto v = get("DC_BASES")) {
    int timeout = 5000;
    if (auto t = get("DC_BASE_TIMEOUT_MS")) timeout = parse_int(*t, "DC_BASE_TIMEOUT_MS");
    config.layer.bases.clear();
    std::stringstream ss(*v);
    std::string url;
    while (std::getline(ss, url, ','))
      if (!url.empty()) config.layer.bases.push_back({url, timeout});
  }
}

void finalize(ServerConfig& config) {
  if (config.layer.instance_id.empty()) config.layer.instance_id = random_instance_id();
  config.layer.validate();
  parse_listen(config.listen);
  if (config.admin_token && config.admin_token->empty()) config.admin_token.reset();
}

std::string random_instance_id() {
  std::random_device rd;
  std::uniform_int_distribution<int> nibble(0, 15);
  std::string id = "dc-";
  for (int i = 0; i < 16; ++i) id += "0123456789abcdef"[nibble(rd)];
  return id;
}

ListenAddress parse_listen(std::string_view listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string_view::npos) invalid("listen must be host:port");
  ListenAddress a;
  a.host = std::string(listen.substr(0, colon));
  if (a.host.empty()) a.host = "0.0.0.0";
  a.port = parse_int(listen.substr(colon + 1), "listen port");
  if (a.port > 65535) invalid("listen port out of range");
  return a;
}

}  // namespace dc::api
