// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mmwcov/association.hpp"
#include "mmwcov/random.hpp"

using namespace mmwcov;

namespace {

// A sits almost on a beam maximum but far away; B is close but between beams.
PointField far_aligned_near_offset() {
  return PointField{{{70.0, std::numbers::pi / 4 + 0.01}, {5.0, 0.0}}, 75.0, 0.0008};
}

}  // namespace

TEST(Association, MaxPowerPrefersNearOffBeamPoint) {
  const AntennaConfig cfg;
  const ChannelParams ch;
  const auto o = associate_p1(far_aligned_near_offset(), cfg, ch);
  EXPECT_EQ(o.serving_index, 1u);
  EXPECT_EQ(o.policy, Policy::kMaxPower);
  EXPECT_GE(o.beam_index, 1);
  EXPECT_NEAR(o.serving_offset, std::numbers::pi / 4, 1e-12);
}

TEST(Association, MinAnglePrefersAlignedPoint) {
  const AntennaConfig cfg;
  const auto o = associate_p2(far_aligned_near_offset(), cfg);
  EXPECT_EQ(o.serving_index, 0u);
  EXPECT_EQ(o.beam_index, 1);
  EXPECT_NEAR(o.serving_offset, 0.01, 1e-12);
  EXPECT_NEAR(o.beam_direction, std::numbers::pi / 4, 1e-12);
}

TEST(Association, NearestUsesRadiusOnly) {
  const auto o = associate_p3(far_aligned_near_offset());
  EXPECT_EQ(o.serving_index, 1u);
  EXPECT_EQ(o.beam_index, 0);
  EXPECT_EQ(o.serving_offset, 0.0);
}

TEST(Association, EmptyFieldThrows) {
  const PointField empty{{}, 75.0, 0.0008};
  const AntennaConfig cfg;
  const ChannelParams ch;
  for (Policy p : {Policy::kMaxPower, Policy::kMinAngle, Policy::kNearest})
    EXPECT_THROW(associate(p, empty, cfg, ch), DomainError);
}

TEST(Association, InterferenceReferenceForP2) {
  const AntennaConfig cfg;
  const auto o = associate_p2(far_aligned_near_offset(), cfg);
  EXPECT_NEAR(interference_reference(o, InterferenceReference::kLink), o.serving.phi, 0.0);
  EXPECT_NEAR(interference_reference(o, InterferenceReference::kBeam), o.beam_direction, 0.0);
}

TEST(Sinr, LonePointIsSignalOverNoise) {
  const AntennaConfig cfg;
  const ChannelParams ch;
  const PointField f{{{20.0, 1.0}}, 75.0, 0.0008};
  const auto o = associate_p3(f);
  auto rng = trial_rng(4, 0);
  const auto s = compute_sinr(f, o, cfg, ch, rng);
  auto replay = trial_rng(4, 0);
  const double h = sample_fading(ch.m_s, replay);
  const double signal = ch.p_tx * h * cfg.g_max() * cfg.g_max() * ch.path_loss_constant() / 400.0;
  EXPECT_EQ(s.interference, 0.0);
  EXPECT_NEAR(s.signal / signal, 1.0, 1e-12);
  EXPECT_NEAR(s.sinr, s.signal / ch.noise, 1e-12 * s.sinr);
}

TEST(Sinr, DeterministicForSeed) {
  const AntennaConfig cfg;
  const ChannelParams ch;
  auto g = trial_rng(9, 3);
  const auto f = sample_ppp(0.0008, 75.0, g, true);
  for (Policy p : {Policy::kMaxPower, Policy::kMinAngle, Policy::kNearest}) {
    const auto o = associate(p, f, cfg, ch);
    auto a = trial_rng(9, 4), b = trial_rng(9, 4);
    EXPECT_EQ(compute_sinr(f, o, cfg, ch, a).sinr, compute_sinr(f, o, cfg, ch, b).sinr);
  }
}

TEST(Sinr, NoNoiseNoInterferenceIsInfinite) {
  const AntennaConfig cfg;
  ChannelParams ch;
  ch.noise = 0.0;
  const PointField f{{{20.0, 1.0}}, 75.0, 0.0008};
  auto rng = trial_rng(1, 1);
  EXPECT_TRUE(std::isinf(compute_sinr(f, associate_p3(f), cfg, ch, rng).sinr));
}
