// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaylab/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "relaylab/caching.hpp"
#include "relaylab/errors.hpp"
#include "relaylab/rng.hpp"

namespace relaylab::sim {

namespace {

using channel::ComplexGain;
using channel::Link;

/// Runs fn(i) for i in [0, n) on `workers` threads. Work items write to
/// disjoint slots, so the schedule never affects the output.
void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double transmit_power(double snr_db, double noise_power) {
  const double snr = std::pow(10.0, snr_db / 10.0);
  return noise_power > 0.0 ? snr * noise_power : snr;
}

double stream_rate(double sinr, int channel_uses, bool& clamped) {
  if (!(sinr <= kSinrClamp)) {
    sinr = kSinrClamp;
    clamped = true;
  }
  return std::log2(1.0 + sinr) / channel_uses;
}

double relative_error(ComplexGain estimate, ComplexGain truth, double rms) {
  const double scale = std::max(std::abs(truth), 1e-3 * rms);
  return scale > 0.0 ? std::abs(estimate - truth) / scale : std::abs(estimate - truth);
}

/// Per-trial outcome: rates[snr][stream].
struct TrialOutcome {
  std::vector<std::vector<double>> rates;
  long resamples = 0;
  bool clamped = false;
  std::optional<double> decode_error;
  std::optional<double> self_interference;
};

std::optional<SlopeFit> fit_top_points(const std::vector<SnrPoint>& points, int slope_points) {
  if (points.size() < 3) return std::nullopt;
  const std::size_t use = std::min(points.size(), static_cast<std::size_t>(slope_points));
  if (use < 3) return std::nullopt;
  std::vector<std::pair<double, double>> xy;
  for (std::size_t i = points.size() - use; i < points.size(); ++i)
    xy.emplace_back(points[i].snr_db, points[i].mean_sum_rate);
  return fit_dof_slope(xy);
}

SimResult reduce(const SimConfig& cfg, const std::vector<TrialOutcome>& trials,
                 std::size_t streams) {
  SimResult result;
  result.scheme = cfg.scheme;
  result.M = cfg.M;
  const auto T = trials.size();
  std::vector<double> column(T);
  for (std::size_t s = 0; s < cfg.snr_grid_db.size(); ++s) {
    SnrPoint point;
    point.snr_db = cfg.snr_grid_db[s];
    point.trials = static_cast<int>(T);
    for (std::size_t j = 0; j < streams; ++j) {
      for (std::size_t t = 0; t < T; ++t) column[t] = trials[t].rates[s][j];
      point.per_stream_rate.push_back(pairwise_sum(column) / static_cast<double>(T));
    }
    for (std::size_t t = 0; t < T; ++t) column[t] = pairwise_sum(trials[t].rates[s]);
    point.mean_sum_rate = pairwise_sum(column) / static_cast<double>(T);
    result.points.push_back(std::move(point));
  }
  for (const auto& t : trials) {
    result.resamples += t.resamples;
    result.rates_clamped = result.rates_clamped || t.clamped;
    if (t.decode_error)
      result.max_decode_error = std::max(result.max_decode_error.value_or(0.0), *t.decode_error);
    if (t.self_interference)
      result.max_self_interference_residual =
          std::max(result.max_self_interference_residual.value_or(0.0), *t.self_interference);
  }
  result.slope = fit_top_points(result.points, cfg.slope_points);
  return result;
}

/// Noiseless end-to-end pass of one prepared block; returns the largest
/// relative symbol error over all 4M - 2 streams.
double noiseless_block_error(const BlockSetup& setup, double P, const ia::Tolerances& tol,
                             std::uint64_t key) {
  const auto& B = setup.beamformers;
  const auto budget = ia::make_link_budget(setup.up, B, P, P, 0.0, 0.0, tol);
  const auto symbols = ia::SymbolBlock::random(B.M, budget.stream_power.group13,
                                               budget.stream_power.group24, key);
  const auto y_relay = channel::first_hop_receive(ia::source_transmit(symbols, B), setup.up, 0.0);
  const auto zf1 = ia::relay_zero_force(y_relay[0], ia::effective_relay_matrix(setup.up, B, 1),
                                        tol.cond_max);
  const auto zf2 = ia::relay_zero_force(y_relay[1], ia::effective_relay_matrix(setup.up, B, 2),
                                        tol.cond_max);
  const auto x_relay =
      ia::relay_transmit_with_gain(ia::forwarded_streams(zf1, zf2), B, budget.relay_gain);
  const auto y_dest = channel::second_hop_receive(x_relay, setup.down, 0.0);
  const channel::NetworkTopology topology;
  double worst = 0.0;
  for (int d = 1; d <= 4; ++d) {
    const auto& own = symbols.x[topology.colocated_source(d) - 1];
    const auto decoded =
        ia::destination_decode(y_dest[d - 1], B, setup.down, own, d, budget, tol.cond_max);
    const double rms = std::sqrt(symbols.power[d - 1]);
    for (std::size_t k = 0; k < decoded.estimates.size(); ++k)
      worst = std::max(worst, relative_error(decoded.estimates[k], symbols.x[d - 1][k], rms));
  }
  return worst;
}

TrialOutcome symmetric_trial(const SimConfig& cfg, int trial) {
  const int M = cfg.M;
  TrialOutcome out;
  for (int attempt = 0;; ++attempt) {
    if (attempt > cfg.max_resamples)
      throw SamplingExhaustedError("trial " + std::to_string(trial) + " exceeded " +
                                   std::to_string(cfg.max_resamples) + " resamples");
    const std::uint64_t seed = stream_key(
        {cfg.master_seed, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(attempt)});
    const auto r = channel::sample_realization(seed, true, 2 * M, cfg.channel);
    try {
      const BlockSetup setup = prepare_block(r, M, 0, cfg.init, cfg.tolerances, seed);
      const auto& B = setup.beamformers;
      const channel::NetworkTopology topology;
      std::vector<std::vector<double>> rates;
      for (double snr_db : cfg.snr_grid_db) {
        const double P = transmit_power(snr_db, cfg.noise_power);
        const auto budget = ia::make_link_budget(setup.up, B, P, P, cfg.noise_power,
                                                 cfg.noise_power, cfg.tolerances);
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(B.stream_count()));
        for (int source = 1; source <= 4; ++source) {
          // Source i's streams are decoded at destination i.
          for (double s : ia::stream_sinr(B, setup.down, source, budget, cfg.tolerances.cond_max))
            row.push_back(stream_rate(s, M, out.clamped));
        }
        rates.push_back(std::move(row));
      }
      if (cfg.noise_power == 0.0)
        out.decode_error = noiseless_block_error(
            setup, transmit_power(cfg.snr_grid_db.back(), 0.0), cfg.tolerances,
            stream_key({seed, 0xDECULL}));
      out.rates = std::move(rates);
      out.resamples = attempt;
      return out;
    } catch (const ConditioningError&) {
    } catch (const SingularChannelError&) {
    }
  }
}

TrialOutcome baseline_trial(const SimConfig& cfg, int trial) {
  TrialOutcome out;
  // Only S_1, R_2 and S_3 are active; uplink in slot 0 and the forwarded
  // signal in slot 1.
  const std::uint64_t seed =
      stream_key({cfg.master_seed, static_cast<std::uint64_t>(trial), 0x111ULL});
  const auto r = channel::sample_realization(seed, false, 2, cfg.channel);
  const ComplexGain h1 = r.gain(Link::up(1, 2), 0);
  const ComplexGain h3 = r.gain(Link::up(3, 2), 0);
  const ComplexGain g1 = r.gain(Link::down(2, 1), 1);
  const ComplexGain g3 = r.gain(Link::down(2, 3), 1);
  const double sigma2 = cfg.noise_power;

  for (double snr_db : cfg.snr_grid_db) {
    const double P = transmit_power(snr_db, sigma2);
    const double beta2 = P / ((std::norm(h1) + std::norm(h3)) * P + sigma2);
    // D_1 removes g1 beta h3 x3 (it knows S_3's symbol), D_3 removes g3 beta h1 x1.
    auto sinr = [&](ComplexGain g, ComplexGain h) {
      const double noise = (std::norm(g) * beta2 + 1.0) * sigma2;
      const double signal = std::norm(g * h) * beta2 * P;
      if (signal == 0.0) return 0.0;
      return noise > 0.0 ? signal / noise : std::numeric_limits<double>::infinity();
    };
    out.rates.push_back(
        {stream_rate(sinr(g1, h1), 1, out.clamped), stream_rate(sinr(g3, h3), 1, out.clamped)});
  }

  if (sigma2 == 0.0) {
    const double P = transmit_power(cfg.snr_grid_db.back(), 0.0);
    ComplexGaussian gaussian(stream_key({seed, 0xBA5EULL}), P);
    const ComplexGain x1 = gaussian();
    const ComplexGain x3 = gaussian();
    const double beta = std::sqrt(P / ((std::norm(h1) + std::norm(h3)) * P));
    const ComplexGain relay_out = beta * (h1 * x1 + h3 * x3);
    const ComplexGain y1 = g1 * relay_out;
    const ComplexGain y3 = g3 * relay_out;
    const ComplexGain clean1 = y1 - g1 * beta * h3 * x3;
    const ComplexGain clean3 = y3 - g3 * beta * h1 * x1;
    const double residual = std::max(std::abs(clean1 - g1 * beta * h1 * x1) / std::abs(y1),
                                     std::abs(clean3 - g3 * beta * h3 * x3) / std::abs(y3));
    const double rms = std::sqrt(P);
    out.self_interference = residual;
    out.decode_error = std::max(relative_error(clean1 / (g1 * beta * h1), x1, rms),
                                relative_error(clean3 / (g3 * beta * h3), x3, rms));
  }
  return out;
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::symmetric_ia: return "symmetric_ia";
    case Scheme::baseline_111: return "baseline_111";
    case Scheme::caching_genie: return "caching_genie";
    case Scheme::caching_tdma: return "caching_tdma";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::symmetric_ia, Scheme::baseline_111, Scheme::caching_genie,
                   Scheme::caching_tdma})
    if (to_string(s) == name) return s;
  throw PreconditionError("unknown scheme '" + name + "'");
}

void SimConfig::validate() const {
  if (M < 1) throw ConfigError("M", "must be >= 1");
  if (M > 16) throw ConfigError("M", "must be <= 16");
  if (trials < 1) throw ConfigError("trials", "must be >= 1");
  if (snr_grid_db.empty()) throw ConfigError("snr_grid_db", "must not be empty");
  for (std::size_t i = 1; i < snr_grid_db.size(); ++i)
    if (!(snr_grid_db[i] > snr_grid_db[i - 1]))
      throw ConfigError("snr_grid_db", "must be strictly increasing");
  if (!(noise_power >= 0.0)) throw ConfigError("noise_power", "must be >= 0");
  if (relay1_antennas < 1) throw ConfigError("N1", "must be >= 1");
  if (relay2_antennas < 1) throw ConfigError("N2", "must be >= 1");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (slope_points < 3) throw ConfigError("slope_points", "must be >= 3");
  if (max_resamples < 0) throw ConfigError("max_resamples", "must be >= 0");
  if (!(tolerances.align > 0.0)) throw ConfigError("tol_align", "must be > 0");
  if (!(tolerances.cond_max >= 1.0)) throw ConfigError("cond_max", "must be >= 1");
  if (!(channel.h_min >= 0.0)) throw ConfigError("h_min", "must be >= 0");
  if (!(channel.h_max > channel.h_min)) throw ConfigError("h_max", "must exceed h_min");
}

SlopeFit fit_dof_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw PreconditionError("slope fit needs at least 3 points");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].first > points[i - 1].first))
      throw PreconditionError("slope fit needs strictly increasing SNR");
  const auto n = static_cast<double>(points.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [snr_db, rate] : points) {
    mean_x += snr_db / 10.0 * std::log2(10.0);
    mean_y += rate;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [snr_db, rate] : points) {
    const double dx = snr_db / 10.0 * std::log2(10.0) - mean_x;
    sxx += dx * dx;
    sxy += dx * (rate - mean_y);
  }
  SlopeFit fit;
  fit.points = static_cast<int>(points.size());
  fit.slope = sxy / sxx;
  double ssr = 0.0;
  for (const auto& [snr_db, rate] : points) {
    const double x = snr_db / 10.0 * std::log2(10.0);
    const double e = rate - (mean_y + fit.slope * (x - mean_x));
    ssr += e * e;
  }
  fit.stderr_ = std::sqrt(ssr / (n - 2.0) / sxx);
  return fit;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

BlockSetup prepare_block(const channel::ChannelRealization& r, int M, int data_block,
                         ia::InitPolicy init, const ia::Tolerances& tol, std::uint64_t init_key) {
  BlockSetup setup{channel::extend_uplink(r, data_block, M),
                   channel::extend_downlink(r, data_block + 1, M), {}};
  const auto v11 = ia::initial_beamformer(ia::source_recursion_diagonal(setup.up, tol), init,
                                          stream_key({init_key, 1}));
  const auto vR11 = ia::initial_beamformer(ia::relay_recursion_diagonal(setup.down, tol), init,
                                           stream_key({init_key, 2}));
  setup.beamformers = ia::build_relay_beamformers(
      ia::build_source_beamformers(setup.up, v11, tol), setup.down, vR11, tol);

  const auto& B = setup.beamformers;
  for (int k = 1; k <= 2; ++k) {
    const double cond = ia::condition_number(ia::effective_relay_matrix(setup.up, B, k));
    if (!(cond <= tol.cond_max))
      throw ConditioningError("effective matrix at relay " + std::to_string(k), cond);
  }
  for (int d = 1; d <= 4; ++d) {
    const double cond = ia::condition_number(ia::destination_matrix(B, setup.down, d));
    if (!(cond <= tol.cond_max))
      throw ConditioningError("destination matrix at D_" + std::to_string(d), cond);
  }
  return setup;
}

PipelineReport run_pipeline(const channel::ChannelRealization& r, int M, int num_blocks,
                            double P, double noise_power, ia::InitPolicy init,
                            const ia::Tolerances& tol, std::uint64_t key) {
  if (num_blocks < 1) throw PreconditionError("pipeline needs at least one data block");
  if (r.num_slots() < (num_blocks + 1) * M)
    throw PreconditionError("pipeline needs (num_blocks + 1) * M slots");

  PipelineReport report;
  report.blocks = num_blocks;
  const channel::NetworkTopology topology;

  // Relay state carried from one time block to the next.
  struct Pending {
    BlockSetup setup;
    ia::LinkBudget budget;
    channel::RelaySignals streams;
  };
  std::optional<Pending> pending;

  for (int n = 0; n <= num_blocks; ++n) {
    const int M_slots = M;
    channel::RelaySignals x_relay{channel::ComplexVector::Zero(M_slots),
                                  channel::ComplexVector::Zero(M_slots)};
    if (pending)
      x_relay = ia::relay_transmit_with_gain(pending->streams, pending->setup.beamformers,
                                             pending->budget.relay_gain);
    // Destinations hear block n - 1's data in time block n.
    const auto y_dest = channel::second_hop_receive(
        x_relay, channel::extend_downlink(r, n, M), noise_power,
        stream_key({key, 0xD0ULL, static_cast<std::uint64_t>(n)}));
    if (pending) {
      const auto& sent = report.sent.back();
      std::array<ia::DecodedBlock, 4> decoded;
      for (int d = 1; d <= 4; ++d) {
        decoded[d - 1] = ia::destination_decode(
            y_dest[d - 1], pending->setup.beamformers, pending->setup.down,
            sent.x[topology.colocated_source(d) - 1], d, pending->budget, tol.cond_max);
        const double rms = std::sqrt(sent.power[d - 1]);
        for (std::size_t k = 0; k < decoded[d - 1].estimates.size(); ++k)
          report.max_relative_error =
              std::max(report.max_relative_error,
                       relative_error(decoded[d - 1].estimates[k], sent.x[d - 1][k], rms));
      }
      report.decoded.push_back(std::move(decoded));
      pending.reset();
    }
    if (n == num_blocks) break;

    BlockSetup setup = prepare_block(r, M, n, init, tol, stream_key({key, 0xB0ULL,
                                                                     static_cast<std::uint64_t>(n)}));
    auto budget = ia::make_link_budget(setup.up, setup.beamformers, P, P, noise_power,
                                       noise_power, tol);
    auto symbols = ia::SymbolBlock::random(M, budget.stream_power.group13,
                                           budget.stream_power.group24,
                                           stream_key({key, 0x5EULL, static_cast<std::uint64_t>(n)}));
    const auto y_relay = channel::first_hop_receive(
        ia::source_transmit(symbols, setup.beamformers), setup.up, noise_power,
        stream_key({key, 0x50ULL, static_cast<std::uint64_t>(n)}));
    const auto zf1 = ia::relay_zero_force(
        y_relay[0], ia::effective_relay_matrix(setup.up, setup.beamformers, 1), tol.cond_max);
    const auto zf2 = ia::relay_zero_force(
        y_relay[1], ia::effective_relay_matrix(setup.up, setup.beamformers, 2), tol.cond_max);
    report.sent.push_back(std::move(symbols));
    pending = Pending{std::move(setup), std::move(budget), ia::forwarded_streams(zf1, zf2)};
  }
  return report;
}

SimResult run_symmetric_ia(const SimConfig& cfg) {
  if (cfg.scheme != Scheme::symmetric_ia)
    throw PreconditionError("run_symmetric_ia needs scheme symmetric_ia");
  cfg.validate();
  std::vector<TrialOutcome> trials(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.workers, [&](int t) { trials[t] = symmetric_trial(cfg, t); });
  SimResult result = reduce(cfg, trials, static_cast<std::size_t>(4 * cfg.M - 2));
  if (result.max_decode_error) result.decode_check_passed = *result.max_decode_error <= 1e-8;
  return result;
}

SimResult run_baseline_111(const SimConfig& cfg) {
  if (cfg.scheme != Scheme::baseline_111)
    throw PreconditionError("run_baseline_111 needs scheme baseline_111");
  cfg.validate();
  std::vector<TrialOutcome> trials(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.workers, [&](int t) { trials[t] = baseline_trial(cfg, t); });
  SimResult result = reduce(cfg, trials, 2);
  result.M = 1;
  if (result.max_decode_error) result.decode_check_passed = *result.max_decode_error <= 1e-8;
  return result;
}

SimResult run_caching(const SimConfig& cfg) {
  if (cfg.scheme != Scheme::caching_genie && cfg.scheme != Scheme::caching_tdma)
    throw PreconditionError("run_caching needs a caching scheme");
  cfg.validate();
  const auto strategy =
      caching::make_delivery(cfg.scheme == Scheme::caching_genie ? "genie" : "tdma");
  const channel::NetworkTopology topology(cfg.relay1_antennas, cfg.relay2_antennas);

  std::vector<char> recovered(static_cast<std::size_t>(cfg.trials), 0);
  std::vector<std::size_t> cache_bits(static_cast<std::size_t>(cfg.trials), 0);
  std::vector<Rational> nominal(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.workers, [&](int t) {
    std::array<caching::MessageWord, 4> W;
    for (int i = 1; i <= 4; ++i)
      W[i - 1] = caching::MessageWord::random(
          cfg.message_bits, i,
          stream_key({cfg.master_seed, static_cast<std::uint64_t>(t), 0xCAULL,
                      static_cast<std::uint64_t>(i)}));
    const auto cache = caching::placement_phase(W[0], W[1], W[2], W[3]);
    const auto relay = caching::super_relay(topology, cache, cache);
    const auto delivered = strategy->deliver(relay.cache, relay.targets);
    bool ok = delivered.size() == 4;
    for (int d = 1; d <= 4 && ok; ++d) {
      const auto& own = W[topology.colocated_source(d) - 1];
      ok = caching::recover_at(d, delivered.at(d), own, topology) == W[d - 1];
    }
    recovered[t] = ok ? 1 : 0;
    cache_bits[t] = cache.size_bits();
    nominal[t] = strategy->nominal_dof(relay);
  });

  SimResult result;
  result.scheme = cfg.scheme;
  result.M = cfg.M;
  result.analytic_rate = true;
  result.nominal_dof = nominal.front();
  result.cache_bits_per_relay = cache_bits.front();
  result.messages_recovered =
      std::all_of(recovered.begin(), recovered.end(), [](char c) { return c == 1; });
  const double dof = to_double(*result.nominal_dof);
  for (double snr_db : cfg.snr_grid_db) {
    SnrPoint point;
    point.snr_db = snr_db;
    point.trials = cfg.trials;
    point.mean_sum_rate = dof * std::log2(transmit_power(snr_db, cfg.noise_power));
    result.points.push_back(point);
  }
  result.slope = fit_top_points(result.points, cfg.slope_points);
  return result;
}

SimResult run(const SimConfig& cfg) {
  switch (cfg.scheme) {
    case Scheme::symmetric_ia: return run_symmetric_ia(cfg);
    case Scheme::baseline_111: return run_baseline_111(cfg);
    case Scheme::caching_genie:
    case Scheme::caching_tdma: return run_caching(cfg);
  }
  throw PreconditionError("unknown scheme");
}

}  // namespace relaylab::sim
