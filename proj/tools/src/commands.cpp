// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaylab_cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include <CLI11.hpp>

#include "relaylab/caching.hpp"
#include "relaylab/channel_model.hpp"
#include "relaylab/config.hpp"
#include "relaylab/dof_calculus.hpp"
#include "relaylab/errors.hpp"
#include "relaylab/ia_scheme.hpp"
#include "relaylab/report.hpp"
#include "relaylab/rng.hpp"
#include "relaylab/simulator.hpp"

namespace relaylab::cli {

namespace fs = std::filesystem;

int cmd_dof_bounds(std::ostream& out, const std::optional<fs::path>& out_dir) {
  std::ostringstream text;
  const auto bound = dof::max_sum(dof::noncaching_outer_bound_system());
  text << "noncaching_outer_bound " << to_string(bound.value) << '\n';
  text << "noncaching_outer_bound_vertex " << to_string(bound.argmax) << '\n';
  text << "cut_set " << to_string(dof::cut_set_dof()) << '\n';

  text << "\n[caching_dof]\nN1,N2,dof\n";
  for (int n1 = 1; n1 <= 4; ++n1)
    for (int n2 = 1; n2 <= 4; ++n2)
      text << n1 << ',' << n2 << ',' << to_string(dof::caching_dof(n1, n2)) << '\n';

  text << "\n[symmetric_scheme_dof]\nM,dof\n";
  for (int m = 1; m <= 16; ++m) text << m << ',' << to_string(dof::symmetric_scheme_dof(m)) << '\n';

  text << "\n[compound_dof]\nN,K,dof\n";
  for (int n = 1; n <= 4; ++n)
    for (int k = 1; k <= 4; ++k) text << n << ',' << k << ',' << to_string(dof::compound_dof(n, k)) << '\n';

  out << text.str();
  if (out_dir) {
    fs::create_directories(*out_dir);
    report::write_file(*out_dir / "dof_bounds.txt", text.str());
  }
  return kSuccess;
}

int cmd_verify(int M, int seeds, bool perturb, std::ostream& out, std::ostream& err) {
  if (M < 1 || seeds < 1) {
    err << "error: --m and --seeds must be >= 1\n";
    return kConfigError;
  }
  if (perturb && M < 2) {
    err << "error: --perturb needs M >= 2 (M = 1 has no constraints)\n";
    return kConfigError;
  }
  const ia::Tolerances tol;
  ia::ResidualReport total;
  total.tolerance = tol.align;
  int first_failing_seed = -1;
  for (int seed = 0; seed < seeds; ++seed) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) {
        err << "error: seed " << seed << " exhausted channel resamples\n";
        return kVerificationFailure;
      }
      const auto key = stream_key({static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(attempt)});
      const auto r = channel::sample_realization(key, true, 2 * M);
      const auto up = channel::extend_uplink(r, 0, M);
      const auto down = channel::extend_downlink(r, 1, M);
      ia::BeamformerSet B;
      try {
        const auto v11 = ia::initial_beamformer(ia::source_recursion_diagonal(up, tol),
                                                ia::InitPolicy::equilibrated);
        const auto vR11 = ia::initial_beamformer(ia::relay_recursion_diagonal(down, tol),
                                                 ia::InitPolicy::equilibrated);
        B = ia::build_relay_beamformers(ia::build_source_beamformers(up, v11, tol), down, vR11, tol);
      } catch (const SingularChannelError&) {
        continue;
      }
      if (perturb) B.v2[0] *= 1.1;
      auto rep = ia::verify_alignment(up, B, tol.align);
      rep.merge(ia::verify_cancellation(down, B, tol.align));
      if (!rep.passed() && first_failing_seed < 0) first_failing_seed = seed;
      total.merge(rep);
      break;
    }
  }

  out << "verify M=" << M << " seeds=" << seeds << (perturb ? " perturb=1" : "") << '\n';
  for (int c = 0; c < ia::kNumConditions; ++c) {
    const auto cond = static_cast<ia::Condition>(c);
    out << "  " << ia::to_string(cond) << ": ";
    if (!total.checked[c]) {
      out << "no constraints\n";
      continue;
    }
    out << "max_residual=" << report::format_double(total.max_residual[c])
        << " worst_index=" << total.worst_index[c] << '\n';
  }
  if (total.passed()) {
    out << "PASS\n";
    return kSuccess;
  }
  const auto& v = total.violations.front();
  out << "FAIL condition=" << ia::to_string(v.condition) << " index=" << v.index
      << " seed=" << first_failing_seed << " residual=" << report::format_double(v.residual)
      << " violations=" << total.violations.size() << '\n';
  return kVerificationFailure;
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed_override, std::optional<int> workers,
                 std::ostream& out, std::ostream& err) {
  sim::SimConfig cfg;
  try {
    cfg = config::load_config(config_path);
    if (seed_override) cfg.master_seed = *seed_override;
    if (workers) cfg.workers = *workers;
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  sim::SimResult result;
  try {
    result = sim::run(cfg);
  } catch (const SamplingExhaustedError& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailure;
  }

  report::RunManifest manifest;
  manifest.config = cfg;
  manifest.tool_version = report::library_version();
  manifest.timestamp = report::utc_timestamp();
  manifest.master_seed = cfg.master_seed;
  manifest.outputs = {out_dir / "results.csv", out_dir / "results.json", out_dir / "manifest.json"};
  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());
    report::write_file(manifest.outputs[0], report::to_csv(result));
    report::write_file(manifest.outputs[1], report::to_json(result));
    report::write_file(manifest.outputs[2], manifest.to_json());
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  out << report::to_csv(result);
  if (!result.decode_check_passed) {
    err << "noiseless decode check failed: max relative error "
        << report::format_double(result.max_decode_error.value_or(0.0)) << '\n';
    return kVerificationFailure;
  }
  if (!result.messages_recovered) {
    err << "cached messages were not recovered bit-exact\n";
    return kVerificationFailure;
  }
  return kSuccess;
}

int cmd_region(int N, std::ostream& out, std::ostream& err) {
  if (N < 1) {
    err << "error: --n must be >= 1\n";
    return kConfigError;
  }
  const auto region = dof::compound_region(N);
  for (const auto& v : region.vertices) out << to_string(v) << '\n';
  return kSuccess;
}

namespace {

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("RELAYLAB_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::uint64_t value = 0;
  const char* end = raw + std::char_traits<char>::length(raw);
  const auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("RELAYLAB_SEED", "expected a nonnegative integer, got '" + std::string(raw) + "'");
  return value;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"relaylab: DoF analysis and simulation of the two-way 2x2x2 relay network"};
  app.require_subcommand(1);
  app.set_version_flag("--version", report::library_version());

  std::optional<std::string> bounds_out;
  auto* bounds = app.add_subcommand("dof-bounds", "exact DoF bounds and tables");
  bounds->add_option("--out", bounds_out, "also write dof_bounds.txt into this directory");

  int verify_m = 0;
  int verify_seeds = 0;
  bool verify_perturb = false;
  auto* verify = app.add_subcommand("verify", "check alignment and cancellation residuals");
  verify->add_option("--m", verify_m, "symbol extension length")->required();
  verify->add_option("--seeds", verify_seeds, "number of channel draws")->required();
  verify->add_flag("--perturb", verify_perturb, "scale v_{2,1} by 1.1 to force a failure");

  std::string sim_config;
  std::string sim_out;
  std::optional<int> sim_workers;
  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo configuration");
  simulate->add_option("--config", sim_config, "JSON config file")->required();
  simulate->add_option("--out", sim_out, "output directory")->required();
  simulate->add_option("--workers", sim_workers, "override the config's worker count");

  int region_n = 0;
  auto* region = app.add_subcommand("region", "vertices of the compound DoF region");
  region->add_option("--n", region_n, "transmit antennas")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion& e) {
    out << report::library_version() << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*bounds) {
      return cmd_dof_bounds(out, bounds_out ? std::optional<fs::path>(*bounds_out) : std::nullopt);
    }
    if (*verify) return cmd_verify(verify_m, verify_seeds, verify_perturb, out, err);
    if (*simulate) return cmd_simulate(sim_config, sim_out, env_seed(), sim_workers, out, err);
    if (*region) return cmd_region(region_n, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailure;
  }
  return kConfigError;
}

}  // namespace relaylab::cli
