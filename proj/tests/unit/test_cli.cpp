// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "relaylab/report.hpp"
#include "relaylab_cli/commands.hpp"

namespace fs = std::filesystem;
using namespace relaylab;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "relaylab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("relaylab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto path = dir / "config.json";
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kMinimal =
    R"({"scheme":"symmetric_ia","M":2,"snr_grid_db":[40,50,60],"trials":50,"master_seed":1})";

}  // namespace

TEST_CASE("dof-bounds prints exact values") {
  const auto r = invoke({"dof-bounds"});
  CHECK(r.code == 0);
  CHECK(r.out.find("noncaching_outer_bound 8/3\n") != std::string::npos);
  CHECK(r.out.find("\n1,1,8/3\n") != std::string::npos);
  CHECK(r.out.find("\nM,dof\n1,2\n") != std::string::npos);
  CHECK(r.out.find("\n2,2,4/3\n") != std::string::npos);
  CHECK(r.out.find('.') == std::string::npos);
}

TEST_CASE("dof-bounds persists its tables") {
  const auto dir = scratch("bounds");
  CHECK(invoke({"dof-bounds", "--out", dir.string()}).code == 0);
  CHECK(slurp(dir / "dof_bounds.txt") == invoke({"dof-bounds"}).out);
}

TEST_CASE("verify passes, handles M = 1 and locates injected faults") {
  const auto ok = invoke({"verify", "--m", "8", "--seeds", "100"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS") != std::string::npos);
  CHECK(invoke({"verify", "--m", "1", "--seeds", "10"}).code == 0);
  const auto bad = invoke({"verify", "--m", "4", "--seeds", "3", "--perturb"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL condition=align_R1 index=1") != std::string::npos);
}

TEST_CASE("region lists sorted reduced vertices") {
  const auto r = invoke({"region", "--n", "2"});
  CHECK(r.code == 0);
  CHECK(r.out == "(0, 0)\n(0, 1)\n(2/3, 2/3)\n(1, 0)\n");
  CHECK(invoke({"region", "--n", "4"}).out.find("(4/5, 4/5)") != std::string::npos);
}

TEST_CASE("simulate writes CSV, JSON and manifest") {
  const auto dir = scratch("simulate");
  const auto cfg = write_config(dir, kMinimal);
  const auto r = invoke({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  const auto csv = slurp(dir / "out" / "results.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(fs::exists(dir / "out" / "results.json"));
  const auto manifest = slurp(dir / "out" / "manifest.json");
  CHECK(manifest.find("\"master_seed\": 1") != std::string::npos);
  CHECK(manifest.find("results.csv") != std::string::npos);
}

TEST_CASE("simulate output is byte-identical across runs and worker counts") {
  const auto dir = scratch("determinism");
  const auto cfg = write_config(dir, kMinimal);
  std::vector<std::string> csvs;
  for (const char* w : {"1", "2", "4", "1"}) {
    const auto out = dir / (std::string("w") + w + std::to_string(csvs.size()));
    REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", out.string(), "--workers", w}).code == 0);
    csvs.push_back(slurp(out / "results.csv"));
  }
  for (const auto& c : csvs) CHECK(c == csvs.front());
}

TEST_CASE("RELAYLAB_SEED overrides the config seed") {
  const auto dir = scratch("seed");
  const auto cfg = write_config(dir, kMinimal);
  REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", (dir / "a").string()}).code == 0);
  ::setenv("RELAYLAB_SEED", "9", 1);
  const auto r = invoke({"simulate", "--config", cfg.string(), "--out", (dir / "b").string()});
  ::setenv("RELAYLAB_SEED", "zz", 1);
  const auto bad = invoke({"simulate", "--config", cfg.string(), "--out", (dir / "c").string()});
  ::unsetenv("RELAYLAB_SEED");
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "a" / "results.csv") != slurp(dir / "b" / "results.csv"));
  CHECK(slurp(dir / "b" / "manifest.json").find("\"master_seed\": 9") != std::string::npos);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("RELAYLAB_SEED") != std::string::npos);
}

TEST_CASE("config errors exit 2 and name the key") {
  const auto dir = scratch("badcfg");
  const auto cfg = write_config(dir, R"({"scheme":"symmetric_ia","trails":5})");
  const auto r = invoke({"simulate", "--config", cfg.string(), "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("'trails'") != std::string::npos);
  CHECK(invoke({"simulate", "--config", (dir / "missing.json").string(), "--out", "x"}).code == 2);
  CHECK(invoke({"verify", "--m", "2"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);
}

TEST_CASE("unwritable output path is reported") {
  const auto dir = scratch("unwritable");
  const auto cfg = write_config(dir, kMinimal);
  std::ofstream(dir / "blocker") << "file";
  const auto r = invoke({"simulate", "--config", cfg.string(), "--out", (dir / "blocker" / "sub").string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("cannot") != std::string::npos);
}

TEST_CASE("installed binary runs end to end") {
  const std::string cmd = std::string(RELAYLAB_CLI_PATH) + " dof-bounds > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
}
