#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "dc/federation/federation.hpp"

namespace dc::api {

// Server configuration, usually read from a TOML file:
//
//   instance_id = "food-overlay"       # default: random hex
//   store = "overlay.db"
//   listen = "127.0.0.1:8081"
//   admin_token = "s3cret"             # admin import disabled when unset
//   max_depth = 4
//
//   [[bases]]
//   endpoint = "http://127.0.0.1:8080"
//   timeout_ms = 5000
//
// Environment overrides: DC_INSTANCE_ID, DC_STORE, DC_LISTEN,
// DC_ADMIN_TOKEN, DC_MAX_DEPTH, DC_BASES (comma-separated URLs replacing the
// file's list) and DC_BASE_TIMEOUT_MS (timeout for DC_BASES entries).
struct ServerConfig {
  std::string store_path = "dc.db";
  std::string listen = "127.0.0.1:8080";
  std::optional<std::string> admin_token;
  federation::LayerConfig layer;
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

// Throws Error(kConfig) on syntax errors, unknown keys and bad values.
ServerConfig parse_config(std::string_view toml_text);
// Throws Error(kConfig) when the file cannot be read.
ServerConfig load_config(const std::filesystem::path& path);
void apply_env_overrides(ServerConfig& config, const EnvLookup& lookup = {});
// Validates the layer config and listen address; fills a random instance id
// when none was given.
void finalize(ServerConfig& config);

std::string random_instance_id();

struct ListenAddress {
  std::string host;
  int port = 0;
};
// "host:port" or ":port" (all interfaces). Throws Error(kConfig).
ListenAddress parse_listen(std::string_view listen);

}  // namespace dc::api
