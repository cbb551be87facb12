// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaylab/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "relaylab/errors.hpp"

namespace relaylab::config {

namespace {

using nlohmann::json;

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!value.is_boolean()) throw ConfigError(key, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!value.is_number_integer()) throw ConfigError(key, "expected an integer");
      if (std::is_unsigned_v<T> && value.is_number_integer() && !value.is_number_unsigned())
        throw ConfigError(key, "expected a nonnegative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) throw ConfigError(key, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!value.is_string()) throw ConfigError(key, "expected a string");
    }
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

sim::SimConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "expected a JSON object");

  sim::SimConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "scheme") {
      try {
        cfg.scheme = sim::parse_scheme(get_as<std::string>(value, key));
      } catch (const PreconditionError& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "M") {
      cfg.M = get_as<int>(value, key);
    } else if (key == "snr_grid_db") {
      if (!value.is_array()) throw ConfigError(key, "expected an array of numbers");
      cfg.snr_grid_db.clear();
      for (const auto& item : value) cfg.snr_grid_db.push_back(get_as<double>(item, key));
    } else if (key == "trials") {
      cfg.trials = get_as<int>(value, key);
    } else if (key == "master_seed") {
      cfg.master_seed = get_as<std::uint64_t>(value, key);
    } else if (key == "noise_power") {
      cfg.noise_power = get_as<double>(value, key);
    } else if (key == "N1") {
      cfg.relay1_antennas = get_as<int>(value, key);
    } else if (key == "N2") {
      cfg.relay2_antennas = get_as<int>(value, key);
    } else if (key == "message_bits") {
      cfg.message_bits = get_as<std::size_t>(value, key);
    } else if (key == "workers") {
      cfg.workers = get_as<int>(value, key);
    } else if (key == "slope_points") {
      cfg.slope_points = get_as<int>(value, key);
    } else if (key == "max_resamples") {
      cfg.max_resamples = get_as<int>(value, key);
    } else if (key == "init") {
      try {
        cfg.init = ia::parse_init_policy(get_as<std::string>(value, key));
      } catch (const PreconditionError& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "tol_align") {
      cfg.tolerances.align = get_as<double>(value, key);
    } else if (key == "cond_max") {
      cfg.tolerances.cond_max = get_as<double>(value, key);
    } else if (key == "singular_floor") {
      cfg.tolerances.floor = get_as<double>(value, key);
    } else if (key == "h_min") {
      cfg.channel.h_min = get_as<double>(value, key);
    } else if (key == "h_max") {
      cfg.channel.h_max = get_as<double>(value, key);
    } else if (key == "max_retries") {
      cfg.channel.max_retries = get_as<std::uint64_t>(value, key);
    } else if (key == "degenerate_floor") {
      cfg.channel.degenerate_floor = get_as<double>(value, key);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  cfg.validate();
  return cfg;
}

sim::SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const sim::SimConfig& cfg) {
  json doc = json::object();
  doc["scheme"] = sim::to_string(cfg.scheme);
  doc["M"] = cfg.M;
  doc["snr_grid_db"] = cfg.snr_grid_db;
  doc["trials"] = cfg.trials;
  doc["master_seed"] = cfg.master_seed;
  doc["noise_power"] = cfg.noise_power;
  doc["N1"] = cfg.relay1_antennas;
  doc["N2"] = cfg.relay2_antennas;
  doc["message_bits"] = cfg.message_bits;
  doc["workers"] = cfg.workers;
  doc["slope_points"] = cfg.slope_points;
  doc["max_resamples"] = cfg.max_resamples;
  doc["init"] = ia::to_string(cfg.init);
  doc["tol_align"] = cfg.tolerances.align;
  doc["cond_max"] = cfg.tolerances.cond_max;
  doc["singular_floor"] = cfg.tolerances.floor;
  doc["h_min"] = cfg.channel.h_min;
  doc["h_max"] = cfg.channel.h_max;
  doc["max_retries"] = cfg.channel.max_retries;
  doc["degenerate_floor"] = cfg.channel.degenerate_floor;
  return doc.dump(2) + "\n";
}

}  // namespace relaylab::config
