// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaylab/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "relaylab/config.hpp"
#include "relaylab/errors.hpp"

#ifndef RELAYLAB_VERSION
#define RELAYLAB_VERSION "0.0.0"
#endif

namespace relaylab::report {

namespace {

using nlohmann::ordered_json;

ordered_json number_or_null(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error("cannot format double");
  return std::string(buf, end);
}

std::string library_version() { return RELAYLAB_VERSION; }

std::string to_csv(const sim::SimResult& result) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& point : result.points) {
    out << sim::to_string(result.scheme) << ',' << result.M << ',' << format_double(point.snr_db)
        << ',' << point.trials << ',' << format_double(point.mean_sum_rate) << ',';
    if (result.slope) out << format_double(result.slope->slope);
    out << ',';
    if (result.slope) out << format_double(result.slope->stderr_);
    out << ',' << result.resamples << '\n';
  }
  return out.str();
}

std::string to_json(const sim::SimResult& result) {
  ordered_json doc;
  doc["scheme"] = sim::to_string(result.scheme);
  doc["M"] = result.M;
  doc["resamples"] = result.resamples;
  if (result.slope) {
    doc["slope_estimate"] = number_or_null(result.slope->slope);
    doc["slope_stderr"] = number_or_null(result.slope->stderr_);
    doc["slope_points"] = result.slope->points;
  } else {
    doc["slope_estimate"] = nullptr;
    doc["slope_stderr"] = nullptr;
  }
  doc["rates_clamped"] = result.rates_clamped;
  if (result.max_decode_error) {
    doc["max_decode_error"] = *result.max_decode_error;
    doc["decode_check_passed"] = result.decode_check_passed;
  }
  if (result.max_self_interference_residual)
    doc["max_self_interference_residual"] = *result.max_self_interference_residual;
  if (result.nominal_dof) {
    doc["nominal_dof"] = to_string(*result.nominal_dof);
    doc["analytic_rate"] = result.analytic_rate;
    doc["messages_recovered"] = result.messages_recovered;
    doc["cache_bits_per_relay"] = result.cache_bits_per_relay;
  }
  ordered_json rows = ordered_json::array();
  for (const auto& point : result.points) {
    ordered_json row;
    row["snr_db"] = point.snr_db;
    row["trials"] = point.trials;
    row["sum_rate_bits"] = number_or_null(point.mean_sum_rate);
    ordered_json streams = ordered_json::array();
    for (double r : point.per_stream_rate) streams.push_back(number_or_null(r));
    row["per_stream_rate_bits"] = std::move(streams);
    rows.push_back(std::move(row));
  }
  doc["points"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string RunManifest::to_json() const {
  ordered_json doc;
  doc["tool_version"] = tool_version;
  doc["timestamp"] = timestamp;
  doc["master_seed"] = master_seed;
  doc["config"] = nlohmann::json::parse(config::serialize_config(config));
  ordered_json paths = ordered_json::array();
  for (const auto& p : outputs) paths.push_back(p.string());
  doc["outputs"] = std::move(paths);
  return doc.dump(2) + "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace relaylab::report
