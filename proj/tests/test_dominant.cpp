// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mmwcov/dominant.hpp"
#include "mmwcov/montecarlo.hpp"
#include "mmwcov/stats.hpp"

using namespace mmwcov;

namespace {

const numerics::QuadratureSpec kTight{1e-9, 1e-13, 4000, 1e-10};

SimPlan plan_for(Policy p, std::size_t n) {
  SimPlan plan;
  plan.policy = p;
  plan.n_trials = n;
  plan.master_seed = 31;
  plan.workers = 0;
  return plan;
}

double empirical_cdf(std::vector<double> v, double x) {
  return static_cast<double>(std::count_if(v.begin(), v.end(), [x](double s) { return s <= x; })) / v.size();
}

}  // namespace

TEST(GainRatioP2, LogDensityIsNormalized) {
  const NetworkParams net;
  const double tmax = std::log10(net.antenna.g_max() / net.antenna.g_s());
  // t = s² flattens the logarithmic blow-up at t = 0.
  const double mass = numerics::integrate_1d(
      [&](double s) { return s == 0.0 ? 0.0 : 2.0 * s * gain_ratio_log10_pdf_p2(s * s, net); }, 0.0, std::sqrt(tmax),
      kTight);
  EXPECT_NEAR(mass, 1.0, 1e-5);
}

TEST(GainRatioP2, AngleAndGainRoutesAgree) {
  const NetworkParams net;
  for (double g : {1.3, 4.0, 30.0, 300.0}) {
    const double a = gain_ratio_pdf_p2(g, net);
    const double b = gain_ratio_pdf_p2_gain_domain(g, net, false);
    EXPECT_NEAR(a / b, 1.0, 1e-5) << g;
  }
}

TEST(GainRatioP2, PositiveExponentFormIsNotADensity) {
  const NetworkParams net;
  const double tmax = std::log10(net.antenna.g_max() / net.antenna.g_s());
  const auto r = numerics::integrate_1d_result(
      [&](double s) {
        const double g = std::pow(10.0, s * s);
        return s == 0.0 ? 0.0 : 2.0 * s * std::log(10.0) * g * gain_ratio_pdf_p2_gain_domain(g, net, true);
      },
      0.0, std::sqrt(tmax), numerics::QuadratureSpec{1e-6, 1e-10, 2000, 1e-9});
  EXPECT_GT(r.value, 1e3);
}

TEST(GainRatioP2, MatchesSimulatedRatio) {
  const NetworkParams net;
  const auto s = sample_statistic(plan_for(Policy::kMinAngle, 100000), Statistic::kGainRatioP2);
  const double n = static_cast<double>(s.x.size());
  ASSERT_GT(n, 1000.0);
  for (double g : {1.5, 5.0, 40.0}) {
    const double t = std::log10(g);
    const double model = numerics::integrate_1d(
        [&](double u) { return u == 0.0 ? 0.0 : 2.0 * u * gain_ratio_log10_pdf_p2(u * u, net); }, 0.0, std::sqrt(t),
        kTight);
    EXPECT_NEAR(empirical_cdf(s.x, g), model, 4.0 * std::sqrt(model * (1 - model) / n) + 1e-3) << g;
  }
}

// One link, m = 1, α = 2: P(h·d^-2 ≤ w) = 1 - (1 - e^{-wR²})/(wR²).
TEST(PathLossFade, SingleLinkExponentialOracle) {
  NetworkParams net;
  const double r2 = 75.0 * 75.0;
  for (double w : {1e-5, 1e-4, 3e-4, 1e-3, 1e-2}) {
    const double expect = 1.0 - (-std::expm1(-w * r2)) / (w * r2);
    EXPECT_NEAR(fade_pathloss_cdf(w, 1, net), expect, 1e-12) << w;
  }
}

TEST(PathLossFade, SingleLinkPdfMatchesCdf) {
  const NetworkParams net;
  for (int m : {1, 2, 3}) {
    const double w = 2e-4;
    const double mass = numerics::integrate_1d(
        [&](double t) { return fade_pathloss_pdf(std::exp(t), m, net) * std::exp(t); }, std::log(w) - 50.0,
        std::log(w), kTight);
    EXPECT_NEAR(mass, fade_pathloss_cdf(w, m, net), 1e-8) << m;
  }
}

// α = 2, m_s = m_x = 2: F_W(w) = w/(1+w) and f_W(1) = 1/4.
TEST(PathLossFadeRatio, ClosedFormAtDefaults) {
  const NetworkParams net;
  for (double w : {0.01, 0.3, 1.0, 4.0, 100.0})
    EXPECT_NEAR(pathloss_fade_ratio_cdf_p2(w, net), w / (1.0 + w), 1e-7) << w;
  EXPECT_NEAR(pathloss_fade_ratio_pdf_p2(1.0, net), 0.25, 1e-7);
}

TEST(PathLossFadeRatio, BracketFormAgrees) {
  NetworkParams net;
  net.channel.m_s = 3;
  net.channel.alpha = 2.3;
  for (double w : {0.2, 1.0, 7.0}) {
    const double a = pathloss_fade_ratio_pdf_p2(w, net);
    EXPECT_NEAR(pathloss_fade_ratio_pdf_p2_bracket_form(w, net) / a, 1.0, 1e-6) << w;
  }
}

TEST(PathLossFadeRatio, PdfIntegratesToCdf) {
  NetworkParams net;
  net.channel.m_x = 1;
  const double w = 3.0;
  const double mass = numerics::integrate_1d(
      [&](double t) { return pathloss_fade_ratio_pdf_p2(std::exp(t), net) * std::exp(t); }, -40.0, std::log(w),
      numerics::QuadratureSpec{1e-7, 1e-11, 2000, 1e-9});
  EXPECT_NEAR(mass, pathloss_fade_ratio_cdf_p2(w, net), 1e-6);
}

TEST(InterfererGainP3, DensityIsNormalized) {
  const NetworkParams net;
  const auto& cfg = net.antenna;
  const double vmax = std::sqrt(std::log10(cfg.g_max() / cfg.g_s()));
  const double mass = numerics::integrate_1d(
      [&](double v) {
        v = std::max(v, 1e-6);  // below this g rounds to g_max
        const double g = cfg.g_max() * std::pow(10.0, -v * v);
        return interferer_gain_pdf_p3(g, net) * g * std::log(10.0) * 2.0 * v;
      },
      0.0, vmax, kTight);
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(GainFadeRatioP3, SingleAndDoubleIntegralAgree) {
  const NetworkParams net;
  for (double g : {0.5, 2.0, 10.0, 200.0}) {
    const double a = gain_fade_ratio_pdf_p3(g, net);
    EXPECT_NEAR(gain_fade_ratio_pdf_p3_double_integral(g, net) / a, 1.0, 1e-5) << g;
  }
}

TEST(GainFadeRatioP3, PdfIntegratesToCdf) {
  const NetworkParams net;
  for (double g : {1.0, 20.0}) {
    const double mass = numerics::integrate_1d(
        [&](double t) { return gain_fade_ratio_pdf_p3(std::exp(t), net) * std::exp(t); }, -40.0, std::log(g),
        numerics::QuadratureSpec{1e-8, 1e-12, 2000, 1e-9});
    EXPECT_NEAR(mass, gain_fade_ratio_cdf_p3(g, net), 1e-7) << g;
  }
}

TEST(DistanceRatioP3, JointQuadratureAgrees) {
  const NetworkParams net;
  for (double w : {1.0, 1.7, 9.0, 120.0})
    EXPECT_NEAR(distance_ratio_pdf_p3_from_joint(w, net) / distance_ratio_pdf_p3(w, net), 1.0, 1e-7) << w;
  EXPECT_EQ(distance_ratio_pdf_p3(0.9, net), 0.0);
  EXPECT_EQ(distance_ratio_cdf_p3(0.9, net), 0.0);
}

// Frozen from the closed form at the default density and radius.
TEST(DistanceRatioP3, PrintedConstantIsNotNormalized) {
  const NetworkParams net;
  EXPECT_NEAR(distance_ratio_printed_mass(net), 52.49, 0.01);
}

TEST(DistanceRatioP3, TailMatchesSimulation) {
  const NetworkParams net;
  const auto s = sample_statistic(plan_for(Policy::kNearest, 200000), Statistic::kDistanceRatioP3);
  const double n = static_cast<double>(s.x.size());
  for (double w : {1.5, 4.0, 20.0, 100.0}) {
    const double p = 1.0 - distance_ratio_cdf_p3(w, net);
    const double emp = 1.0 - empirical_cdf(s.x, w);
    EXPECT_NEAR(emp, p, 4.0 * std::sqrt(p * (1 - p) / n)) << w;
  }
}

TEST(DominantCoverage, LimitsAndMonotonicity) {
  const NetworkParams net;
  EXPECT_EQ(coverage_dom_p2(0.0, net), 1.0);
  EXPECT_EQ(coverage_dom_p3(0.0, net), 1.0);
  double p2 = 1.0, p3 = 1.0;
  for (double gdb : {-10.0, 0.0, 10.0}) {
    const double a = coverage_dom_p2(db_to_linear(gdb), net);
    const double b = coverage_dom_p3(db_to_linear(gdb), net);
    EXPECT_LT(a, p2);
    EXPECT_LT(b, p3);
    p2 = a;
    p3 = b;
  }
  EXPECT_THROW(coverage_dom_p3(-1.0, net), DomainError);
}

TEST(DominantCoverage, MatchesSimulatedDominantSir) {
  const NetworkParams net;
  for (Policy p : {Policy::kMinAngle, Policy::kNearest}) {
    auto plan = plan_for(p, 100000);
    plan.thresholds_db = {-5.0, 5.0};
    const auto mc = run_dominant_coverage(plan);
    const auto an = dominant_curve(p, plan.thresholds_db, net);
    EXPECT_EQ(an.engine, "dominant");
    for (std::size_t i = 0; i < 2; ++i)
      EXPECT_NEAR(an.rows[i].value, mc.rows[i].value, std::max(0.01, 4 * mc.rows[i].stderr_)) << policy_tag(p);
  }
  EXPECT_THROW(dominant_curve(Policy::kMaxPower, {0.0}, net), DomainError);
}

TEST(DominantCoverage, PrintedPairingDiffers) {
  const NetworkParams net;
  EXPECT_EQ(coverage_dom_p3_printed_pairing(db_to_linear(-5.0), net), 1.0);
  EXPECT_GT(std::abs(coverage_dom_p3_printed_pairing(db_to_linear(10.0), net) - coverage_dom_p3(db_to_linear(10.0), net)),
            0.1);
}
