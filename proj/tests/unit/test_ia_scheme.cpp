// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include "relaylab/errors.hpp"
#include "relaylab/ia_scheme.hpp"
#include "relaylab/rng.hpp"
#include "test_support.hpp"

using namespace relaylab;
using namespace relaylab::ia;
using channel::ChannelRealization;
using channel::Link;
using relaylab::testing::rel_err;

namespace {

struct Fixture {
  channel::UplinkChannels up;
  channel::DownlinkChannels down;
  BeamformerSet B;
};

Fixture build(std::uint64_t seed, int M, InitPolicy init = InitPolicy::equilibrated) {
  const auto r = channel::sample_realization(seed, true, 2 * M);
  Fixture f{channel::extend_uplink(r, 0, M), channel::extend_downlink(r, 1, M), {}};
  const auto v11 = initial_beamformer(source_recursion_diagonal(f.up), init, seed);
  const auto vR = initial_beamformer(relay_recursion_diagonal(f.down), init, seed + 1);
  f.B = build_relay_beamformers(build_source_beamformers(f.up, v11), f.down, vR);
  return f;
}

// Realization whose four link classes take hand-picked per-slot values.
ChannelRealization hand_picked(int M) {
  return ChannelRealization::from_function(2 * M, true, [](const Link& l, int slot) {
    const double s = 1.0 + 0.25 * slot;
    if (l.hop == Link::Hop::uplink)
      return l.node % 2 == 1 ? ComplexGain(s, 0.5 * l.relay) : ComplexGain(0.5 * l.relay, -s);
    return l.node % 2 == 1 ? ComplexGain(-0.3 * l.relay, s) : ComplexGain(s + l.relay, 0.2);
  });
}

Eigen::VectorXcd ones(int M) { return Eigen::VectorXcd::Ones(M); }

}  // namespace

TEST_CASE("identity uplink collapses the source recursion") {
  const auto r = ChannelRealization::constant(6, ComplexGain(1.0, 0.0));
  const auto up = channel::extend_uplink(r, 0, 3);
  const auto B = build_source_beamformers(up, ones(3));
  REQUIRE(B.v1.size() == 3);
  REQUIRE(B.v2.size() == 2);
  for (const auto& v : B.v1) CHECK(v == ones(3));
  for (const auto& v : B.v2) CHECK(v == ones(3));
}

TEST_CASE("identity downlink gives negated relay-2 beamformers") {
  const auto r = ChannelRealization::constant(6, ComplexGain(1.0, 0.0));
  const auto up = channel::extend_uplink(r, 0, 3);
  const auto down = channel::extend_downlink(r, 1, 3);
  const auto B = build_relay_beamformers(build_source_beamformers(up, ones(3)), down, ones(3));
  for (const auto& v : B.vR1) CHECK(v == ones(3));
  REQUIRE(B.vR2.size() == 2);
  for (const auto& v : B.vR2) CHECK(v == -ones(3));
}

TEST_CASE("M = 1 has no aligned streams") {
  const auto f = build(3, 1);
  CHECK(f.B.v1.size() == 1);
  CHECK(f.B.v2.empty());
  CHECK(f.B.vR1.size() == 1);
  CHECK(f.B.vR2.empty());
  CHECK(f.B.stream_count() == 2);
}

TEST_CASE("M = 2 beamformers match a per-entry scalar oracle") {
  const int M = 2;
  const auto r = hand_picked(M);
  const auto up = channel::extend_uplink(r, 0, M);
  const auto down = channel::extend_downlink(r, 1, M);
  Eigen::VectorXcd v11(2), vR(2);
  v11 << ComplexGain(0.8, 0.1), ComplexGain(-1.1, 0.6);
  vR << ComplexGain(1.3, -0.4), ComplexGain(0.2, 0.9);
  const auto B = build_relay_beamformers(build_source_beamformers(up, v11), down, vR);
  for (int m = 0; m < M; ++m) {
    const ComplexGain a = r.gain(Link::up(1, 1), m), b = r.gain(Link::up(2, 1), m);
    const ComplexGain c = r.gain(Link::up(1, 2), m), d = r.gain(Link::up(2, 2), m);
    CHECK(rel_err(B.v1[1](m), b * c / (a * d) * v11(m)) <= 1e-14);
    CHECK(rel_err(B.v2[0](m), c / d * v11(m)) <= 1e-14);
    const ComplexGain e = r.gain(Link::down(1, 1), M + m), g = r.gain(Link::down(2, 1), M + m);
    const ComplexGain h = r.gain(Link::down(1, 2), M + m), k = r.gain(Link::down(2, 2), M + m);
    CHECK(rel_err(B.vR1[1](m), g * h / (e * k) * vR(m)) <= 1e-14);
    CHECK(rel_err(B.vR2[0](m), -(h / k) * vR(m)) <= 1e-14);
  }
}

TEST_CASE("beamformer preconditions") {
  const auto f = build(5, 3);
  Eigen::VectorXcd bad = ones(3);
  bad(1) = 0.0;
  CHECK_THROWS_AS(build_source_beamformers(f.up, bad), PreconditionError);
  CHECK_THROWS_AS(build_source_beamformers(f.up, ones(2)), DimensionError);
  const auto generic = channel::sample_realization(5, false, 6);
  CHECK_THROWS_AS(build_source_beamformers(channel::extend_uplink(generic, 0, 3), ones(3)),
                  PreconditionError);
  const auto dead = ChannelRealization::constant(3, ComplexGain(1e-9, 0.0));
  CHECK_THROWS_AS(build_source_beamformers(channel::extend_uplink(dead, 0, 3), ones(3)),
                  SingularChannelError);
}

TEST_CASE("alignment and cancellation residuals vanish for built sets") {
  for (int M = 1; M <= 8; ++M) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto f = build(seed * 131 + M, M);
      auto rep = verify_alignment(f.up, f.B);
      rep.merge(verify_cancellation(f.down, f.B));
      INFO("M=" << M << " seed=" << seed);
      CHECK(rep.passed());
      for (double r : rep.max_residual) CHECK(r <= 1e-9);
    }
  }
}

TEST_CASE("perturbed v_{2,1} is located at R1, index 1") {
  auto f = build(9, 4);
  f.B.v2[0] *= 1.1;
  const auto rep = verify_alignment(f.up, f.B);
  REQUIRE_FALSE(rep.passed());
  CHECK(rep.max_residual[static_cast<int>(Condition::align_r1)] > 1e-2);
  const auto& v = rep.violations.front();
  CHECK(v.condition == Condition::align_r1);
  CHECK(v.index == 1);
}

TEST_CASE("relay zero forcing exposes the aligned sums for M = 2") {
  const auto f = build(17, 2);
  const auto s = SymbolBlock::random(2, 1.0, 1.0, 4);
  const auto y = channel::first_hop_receive(source_transmit(s, f.B), f.up, 0.0);
  const auto x1 = relay_zero_force(y[0], effective_relay_matrix(f.up, f.B, 1));
  CHECK(rel_err(x1(0), s.x[0][0] + s.x[2][0]) <= 1e-12);
  CHECK(rel_err(x1(1), s.x[0][1] + s.x[2][1] + s.x[1][0] + s.x[3][0]) <= 1e-12);
  const auto x2 = relay_zero_force(y[1], effective_relay_matrix(f.up, f.B, 2));
  CHECK(rel_err(x2(0), s.x[0][0] + s.x[2][0] + s.x[1][0] + s.x[3][0]) <= 1e-12);
  CHECK(rel_err(x2(1), s.x[0][1] + s.x[2][1]) <= 1e-12);

  const auto zero = relay_zero_force(Eigen::VectorXcd::Zero(2), effective_relay_matrix(f.up, f.B, 1));
  CHECK(zero.isZero(0.0));
}

TEST_CASE("relay zero forcing matches the mixing matrix for random M") {
  for (int M : {3, 5, 7}) {
    const auto f = build(100 + M, M);
    const auto s = SymbolBlock::random(M, 1.0, 1.0, 8);
    Eigen::VectorXcd sums(2 * M - 1);
    for (int k = 0; k < M; ++k) sums(k) = s.x[0][k] + s.x[2][k];
    for (int k = 0; k + 1 < M; ++k) sums(M + k) = s.x[1][k] + s.x[3][k];
    const auto y = channel::first_hop_receive(source_transmit(s, f.B), f.up, 0.0);
    for (int k = 1; k <= 2; ++k) {
      const Eigen::VectorXcd expect = relay_mixing_matrix(M, k).cast<ComplexGain>() * sums;
      const auto got = relay_zero_force(y[k - 1], effective_relay_matrix(f.up, f.B, k));
      for (int i = 0; i < M; ++i) CHECK(rel_err(got(i), expect(i)) <= 1e-9);
    }
  }
}

TEST_CASE("ill-conditioned effective matrix raises with its condition number") {
  Eigen::MatrixXcd H(2, 2);
  H << 1.0, 1.0, 1.0, 1.0 + 1e-12;
  try {
    relay_zero_force(Eigen::VectorXcd::Ones(2), H, 1e8);
    FAIL("expected ConditioningError");
  } catch (const ConditioningError& e) {
    CHECK(e.condition_number() > 1e8);
  }
}

TEST_CASE("relay transmit: zeros, collinearity, power") {
  const int M = 4;
  const auto f = build(23, M);
  channel::RelaySignals zero{Eigen::VectorXcd::Zero(M), Eigen::VectorXcd::Zero(M - 1)};
  const auto xz = relay_transmit_with_gain(zero, f.B, 1.0);
  CHECK(xz[0].isZero(0.0));
  CHECK(xz[1].isZero(0.0));

  channel::RelaySignals one = zero;
  one[0](2) = ComplexGain(0.5, -1.0);
  const auto x1 = relay_transmit(one, f.B, 1.0);
  const ComplexGain ratio = x1[0](0) / f.B.vR1[2](0);
  CHECK(rel_err(x1[0], ratio * f.B.vR1[2]) <= 1e-12);

  for (std::uint64_t key = 0; key < 20; ++key) {
    channel::RelaySignals s{Eigen::VectorXcd(M), Eigen::VectorXcd(M - 1)};
    ComplexGaussian g(key, 5.0);
    for (int k = 0; k < M; ++k) s[0](k) = g();
    for (int k = 0; k + 1 < M; ++k) s[1](k) = g();
    const double P = 3.0;
    const auto x = relay_transmit(s, f.B, P);
    for (const auto& v : x) CHECK(v.squaredNorm() / M <= P * (1.0 + 1e-9));
  }

  channel::RelaySignals wrong{Eigen::VectorXcd::Zero(M), Eigen::VectorXcd::Zero(M)};
  CHECK_THROWS_AS(relay_transmit(wrong, f.B, 1.0), DimensionError);
}

TEST_CASE("source powers meet the per-slot budget") {
  const auto f = build(31, 5);
  const double P = 10.0;
  const auto p = source_stream_powers(f.B, P);
  double e13 = 0.0, e24 = 0.0;
  for (const auto& v : f.B.v1) e13 += p.group13 * v.squaredNorm();
  for (const auto& v : f.B.v2) e24 += p.group24 * v.squaredNorm();
  CHECK(e13 / 5 == Catch::Approx(P).epsilon(1e-12));
  CHECK(e24 / 5 == Catch::Approx(P).epsilon(1e-12));
}

namespace {

std::array<DecodedBlock, 4> run_noiseless(const Fixture& f, const SymbolBlock& s,
                                          const LinkBudget& budget) {
  const auto y = channel::first_hop_receive(source_transmit(s, f.B), f.up, 0.0);
  const auto z1 = relay_zero_force(y[0], effective_relay_matrix(f.up, f.B, 1));
  const auto z2 = relay_zero_force(y[1], effective_relay_matrix(f.up, f.B, 2));
  const auto xr = relay_transmit_with_gain(forwarded_streams(z1, z2), f.B, budget.relay_gain);
  const auto yd = channel::second_hop_receive(xr, f.down, 0.0);
  const channel::NetworkTopology topo;
  std::array<DecodedBlock, 4> out;
  for (int d = 1; d <= 4; ++d)
    out[d - 1] = destination_decode(yd[d - 1], f.B, f.down, s.x[topo.colocated_source(d) - 1], d, budget);
  return out;
}

}  // namespace

TEST_CASE("noiseless M = 3 decoding is exact at every destination") {
  const auto f = build(41, 3);
  const auto budget = make_link_budget(f.up, f.B, 100.0, 100.0, 0.0, 0.0);
  const auto s = SymbolBlock::random(3, budget.stream_power.group13, budget.stream_power.group24, 6);
  const auto dec = run_noiseless(f, s, budget);
  for (int d = 1; d <= 4; ++d) {
    REQUIRE(dec[d - 1].estimates.size() == s.x[d - 1].size());
    CHECK(dec[d - 1].estimates.size() == static_cast<std::size_t>(SymbolBlock::streams_of(d, 3)));
    for (std::size_t k = 0; k < dec[d - 1].estimates.size(); ++k)
      CHECK(rel_err(dec[d - 1].estimates[k], s.x[d - 1][k]) <= 1e-8);
  }
}

TEST_CASE("silent sources decode to zero with zero SINR") {
  const auto f = build(43, 3);
  const auto budget = make_link_budget(f.up, f.B, 100.0, 100.0, 1.0, 1.0);
  const auto dec = run_noiseless(f, SymbolBlock::zeros(3), budget);
  for (const auto& d : dec)
    for (const auto& e : d.estimates) CHECK(std::abs(e) <= 1e-12);
  LinkBudget silent = budget;
  silent.stream_power = {0.0, 0.0};
  for (int d = 1; d <= 4; ++d)
    for (double s : stream_sinr(f.B, f.down, d, silent)) CHECK(s == 0.0);
}

TEST_CASE("missing side information is rejected") {
  const auto f = build(47, 2);
  const auto budget = make_link_budget(f.up, f.B, 10.0, 10.0, 1.0, 1.0);
  std::vector<ComplexGain> short_info(1);
  CHECK_THROWS_AS(destination_decode(Eigen::VectorXcd::Zero(2), f.B, f.down, short_info, 1, budget),
                  PreconditionError);
}

TEST_CASE("pipeline is linear in the transmitted symbols") {
  const auto f = build(53, 4);
  const auto budget = make_link_budget(f.up, f.B, 10.0, 10.0, 0.0, 0.0);
  const auto a = SymbolBlock::random(4, 1.0, 2.0, 1);
  const auto b = SymbolBlock::random(4, 1.0, 2.0, 2);
  const ComplexGain alpha(0.4, 1.1), beta(-0.9, 0.3);
  SymbolBlock mix = a;
  for (int i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < a.x[i].size(); ++k) mix.x[i][k] = alpha * a.x[i][k] + beta * b.x[i][k];
  const auto da = run_noiseless(f, a, budget);
  const auto db = run_noiseless(f, b, budget);
  const auto dm = run_noiseless(f, mix, budget);
  for (int d = 0; d < 4; ++d)
    for (std::size_t k = 0; k < dm[d].estimates.size(); ++k)
      CHECK(rel_err(dm[d].estimates[k], alpha * da[d].estimates[k] + beta * db[d].estimates[k]) <= 1e-10);
}

TEST_CASE("stream SINR grows linearly with power") {
  const auto f = build(59, 3);
  std::vector<std::vector<double>> ratio;
  std::vector<double> prev;
  for (double P : {1e3, 1e4, 1e5, 1e6, 1e7}) {
    const auto budget = make_link_budget(f.up, f.B, P, P, 1.0, 1.0);
    std::vector<double> all;
    for (int d = 1; d <= 4; ++d)
      for (double s : stream_sinr(f.B, f.down, d, budget)) all.push_back(s);
    REQUIRE(all.size() == 10);
    if (!prev.empty())
      for (std::size_t j = 0; j < all.size(); ++j) CHECK(all[j] >= prev[j]);
    prev = all;
    std::vector<double> r;
    for (double s : all) r.push_back(s / P);
    ratio.push_back(r);
  }
  for (std::size_t j = 0; j < ratio.back().size(); ++j) {
    CHECK(ratio.back()[j] > 0.0);
    CHECK(ratio.back()[j] / ratio[ratio.size() - 2][j] == Catch::Approx(1.0).epsilon(1e-2));
  }
}

TEST_CASE("init policies are all entrywise nonzero") {
  const auto f = build(61, 4);
  const auto t = source_recursion_diagonal(f.up);
  for (auto p : {InitPolicy::ones, InitPolicy::random, InitPolicy::equilibrated}) {
    const auto v = initial_beamformer(t, p, 3);
    for (int m = 0; m < 4; ++m) CHECK(std::abs(v(m)) > 0.0);
    CHECK(parse_init_policy(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_init_policy("nope"), PreconditionError);
}
