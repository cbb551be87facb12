// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "relaylab/config.hpp"
#include "relaylab/errors.hpp"
#include "relaylab/report.hpp"
#include "relaylab/simulator.hpp"

using namespace relaylab;
using namespace relaylab::sim;

namespace {

SimConfig quick(Scheme scheme, int M, int trials = 40) {
  SimConfig c;
  c.scheme = scheme;
  c.M = M;
  c.trials = trials;
  return c;
}

std::vector<std::pair<double, double>> line(double slope, double offset) {
  std::vector<std::pair<double, double>> pts;
  for (double db : {40.0, 50.0, 60.0}) pts.emplace_back(db, offset + slope * db / 10.0 * std::log2(10.0));
  return pts;
}

}  // namespace

TEST_CASE("slope fit recovers exact lines") {
  const auto fit = fit_dof_slope(line(3.0, 1.5));
  CHECK(fit.slope == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(fit.stderr_ == Catch::Approx(0.0).margin(1e-9));
  CHECK(fit.points == 3);
  CHECK(fit_dof_slope(line(0.0, 7.0)).slope == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("slope fit preconditions") {
  std::vector<std::pair<double, double>> two{{40.0, 1.0}, {50.0, 2.0}};
  CHECK_THROWS_AS(fit_dof_slope(two), PreconditionError);
  std::vector<std::pair<double, double>> flat{{40.0, 1.0}, {40.0, 2.0}, {50.0, 3.0}};
  CHECK_THROWS_AS(fit_dof_slope(flat), PreconditionError);
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == Catch::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("symmetric scheme high-SNR slopes") {
  const auto r1 = run(quick(Scheme::symmetric_ia, 1));
  REQUIRE(r1.slope);
  CHECK(r1.slope->slope == Catch::Approx(2.0).margin(0.1));
  const auto r2 = run(quick(Scheme::symmetric_ia, 2, 100));
  REQUIRE(r2.slope);
  CHECK(r2.slope->slope == Catch::Approx(3.0).margin(0.2));
}

TEST_CASE("stream accounting and monotone sum rate") {
  for (int M : {1, 2, 3, 5}) {
    const auto r = run(quick(Scheme::symmetric_ia, M, 20));
    REQUIRE(r.points.size() == 4);
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      CHECK(r.points[i].per_stream_rate.size() == static_cast<std::size_t>(4 * M - 2));
      CHECK(r.points[i].mean_sum_rate >= 0.0);
      if (i > 0) CHECK(r.points[i].mean_sum_rate >= r.points[i - 1].mean_sum_rate);
    }
    CHECK(r.slope->slope <= 4.2);
  }
  const auto b = run(quick(Scheme::baseline_111, 1));
  CHECK(b.points.front().per_stream_rate.size() == 2);
  CHECK(b.slope->slope == Catch::Approx(2.0).margin(0.2));
}

TEST_CASE("identical configs give identical results at any worker count") {
  auto cfg = quick(Scheme::symmetric_ia, 3, 30);
  const auto a = run(cfg);
  CHECK(a == run(cfg));
  for (int w : {2, 4}) {
    cfg.workers = w;
    CHECK(a == run(cfg));
  }
  cfg.master_seed = 2;
  CHECK_FALSE(a == run(cfg));
}

TEST_CASE("noiseless sentinel checks decoding and clamps rates") {
  auto cfg = quick(Scheme::symmetric_ia, 3, 10);
  cfg.noise_power = 0.0;
  const auto r = run(cfg);
  REQUIRE(r.max_decode_error);
  CHECK(*r.max_decode_error <= 1e-8);
  CHECK(r.decode_check_passed);
  CHECK(r.rates_clamped);
  for (const auto& p : r.points) CHECK(std::isfinite(p.mean_sum_rate));
}

TEST_CASE("baseline noiseless recovery and self-interference subtraction") {
  auto cfg = quick(Scheme::baseline_111, 1, 20);
  cfg.noise_power = 0.0;
  const auto r = run(cfg);
  REQUIRE(r.max_decode_error);
  CHECK(*r.max_decode_error <= 1e-8);
  REQUIRE(r.max_self_interference_residual);
  CHECK(*r.max_self_interference_residual <= 1e-12);
}

TEST_CASE("caching runs recover messages and report nominal DoF") {
  auto cfg = quick(Scheme::caching_genie, 1, 25);
  const auto g = run(cfg);
  CHECK(g.messages_recovered);
  CHECK(g.nominal_dof == Rational(8, 3));
  CHECK(g.analytic_rate);
  CHECK(g.cache_bits_per_relay == 2 * 1024);
  CHECK(g.slope->slope == Catch::Approx(8.0 / 3.0).epsilon(1e-9));

  cfg.scheme = Scheme::caching_tdma;
  const auto t = run(cfg);
  CHECK(t.messages_recovered);
  CHECK(t.nominal_dof == Rational(2));

  cfg.scheme = Scheme::caching_genie;
  cfg.message_bits = 0;
  const auto empty = run(cfg);
  CHECK(empty.messages_recovered);
  CHECK(empty.cache_bits_per_relay == 0);

  cfg.message_bits = 64;
  cfg.relay1_antennas = 2;
  cfg.relay2_antennas = 3;
  CHECK(run(cfg).nominal_dof == Rational(20, 6));
}

TEST_CASE("scheme-specific entry points reject other schemes") {
  CHECK_THROWS_AS(run_symmetric_ia(quick(Scheme::baseline_111, 1)), PreconditionError);
  CHECK_THROWS_AS(run_baseline_111(quick(Scheme::symmetric_ia, 1)), PreconditionError);
  CHECK_THROWS_AS(run_caching(quick(Scheme::symmetric_ia, 1)), PreconditionError);
}

TEST_CASE("causal pipeline decodes every block exactly when noiseless") {
  const int M = 3, blocks = 4;
  const auto r = channel::sample_realization(77, true, (blocks + 1) * M);
  const auto rep = run_pipeline(r, M, blocks, 1e4, 0.0, ia::InitPolicy::equilibrated, {}, 5);
  CHECK(rep.blocks == blocks);
  CHECK(rep.sent.size() == static_cast<std::size_t>(blocks));
  CHECK(rep.decoded.size() == static_cast<std::size_t>(blocks));
  CHECK(rep.max_relative_error <= 1e-8);
  CHECK_THROWS_AS(run_pipeline(r, M, blocks + 1, 1e4, 0.0, ia::InitPolicy::equilibrated, {}, 5),
                  PreconditionError);
}

TEST_CASE("config validation names the offending field") {
  auto expect_key = [](SimConfig c, const std::string& key) {
    try {
      c.validate();
      FAIL("expected ConfigError for " << key);
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
    }
  };
  SimConfig c;
  c.trials = 0;
  expect_key(c, "trials");
  c = {};
  c.M = 0;
  expect_key(c, "M");
  c = {};
  c.snr_grid_db = {50.0, 40.0};
  expect_key(c, "snr_grid_db");
  c = {};
  c.noise_power = -1.0;
  expect_key(c, "noise_power");
}

TEST_CASE("config serialization round trips") {
  SimConfig c;
  c.scheme = Scheme::caching_tdma;
  c.M = 7;
  c.snr_grid_db = {10.5, 20.25, 33.125};
  c.trials = 12;
  c.master_seed = 0xFFFFFFFFFFFFFFF0ULL;
  c.noise_power = 0.1;
  c.relay1_antennas = 3;
  c.message_bits = 17;
  c.workers = 3;
  c.init = ia::InitPolicy::random;
  c.tolerances.cond_max = 1e7;
  c.channel.h_min = 0.01;
  CHECK(config::parse_config(config::serialize_config(c)) == c);
  CHECK(config::parse_config(config::serialize_config(SimConfig{})) == SimConfig{});
}

TEST_CASE("config parsing rejects bad input with the key") {
  auto key_of = [](const std::string& text) {
    try {
      config::parse_config(text);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of(R"({"scheme":"symmetric_ia","bogus":1})") == "bogus");
  CHECK(key_of(R"({"M":"two"})") == "M");
  CHECK(key_of(R"({"M":2.5})") == "M");
  CHECK(key_of(R"({"snr_grid_db":[40,"x"]})") == "snr_grid_db");
  CHECK(key_of(R"({"scheme":"nope"})") == "scheme");
  CHECK(key_of(R"({"master_seed":-3})") == "master_seed");
  CHECK(key_of(R"({"trials":0})") == "trials");
  CHECK(key_of("{not json") == "<document>");
  CHECK(key_of("[1,2]") == "<document>");
  CHECK(key_of(R"({"M":2})") == "<none>");
}

TEST_CASE("CSV layout") {
  SimConfig c = quick(Scheme::symmetric_ia, 2, 50);
  c.snr_grid_db = {40.0, 50.0, 60.0};
  const auto csv = report::to_csv(run(c));
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "scheme,M,snr_db,trials,sum_rate_bits,slope_estimate,slope_stderr,resamples");
  int rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    CHECK(row.rfind("symmetric_ia,2,", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') == 7);
    CHECK(row.find(",,") == std::string::npos);
  }
  CHECK(rows == 3);

  c.snr_grid_db = {40.0, 50.0};
  const auto short_csv = report::to_csv(run(c));
  CHECK(short_csv.find(",,,") != std::string::npos);
}

TEST_CASE("JSON mirror carries per-stream arrays") {
  const auto r = run(quick(Scheme::symmetric_ia, 2, 5));
  const auto json = report::to_json(r);
  CHECK(json.find("\"per_stream_rate_bits\"") != std::string::npos);
  CHECK(json.find("\"slope_estimate\"") != std::string::npos);
  CHECK(report::format_double(0.1) == "0.1");
}
