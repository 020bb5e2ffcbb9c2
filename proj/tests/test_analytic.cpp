// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "mmwcov/analytic.hpp"
#include "mmwcov/montecarlo.hpp"

using namespace mmwcov;

namespace {

double mc_coverage(Policy p, double gamma_db, std::size_t n, double* se) {
  SimPlan plan;
  plan.policy = p;
  plan.thresholds_db = {gamma_db};
  plan.n_trials = n;
  plan.master_seed = 77;
  plan.workers = 0;
  const auto row = run_coverage(plan).rows.front();
  *se = row.stderr_;
  return row.value;
}

}  // namespace

TEST(ServingPower, CdfStartsAtVoidMassAndMatchesPdf) {
  const NetworkParams net;
  const ServingPowerLaw law(net);
  EXPECT_NEAR(law.cdf(law.w_min()), law.void_mass(), 1e-15);
  EXPECT_NEAR(law.cdf(law.w_min() * 0.5), law.void_mass(), 0.0);
  for (double w : {law.kink() * 0.7, law.kink() * 3.0, law.upper_level(1e-3)}) {
    const double lo = std::log(law.w_min()), hi = std::log(w);
    std::vector<double> br;
    if (std::log(law.kink()) < hi) br.push_back(std::log(law.kink()));
    const double mass = numerics::integrate_1d([&](double t) { return law.pdf(std::exp(t)) * std::exp(t); }, lo, hi,
                                               {1e-10, 1e-14, 2000, 1e-9}, br);
    EXPECT_NEAR(mass, law.cdf(w) - law.void_mass(), 1e-7) << w;
  }
  EXPECT_LT(law.ccdf(law.upper_level(1e-6)), 1e-6);
}

TEST(ServingPower, GainDomainInnerDensityAgrees) {
  for (int m : {1, 2, 3}) {
    NetworkParams net;
    net.antenna.sector_exp = m;
    const ServingPowerLaw law(net);
    for (double f : {1.05, 1.6, 2.5, 8.0}) {
      const double w = law.w_min() * f;
      const double a = law.inner_pdf(w);
      const double b = law.inner_pdf_gain_domain(w);
      EXPECT_NEAR(a, b, 1e-6 * std::max(a, 1e-300)) << m << " " << f;
    }
  }
}

TEST(PhiC, MassIsNonemptyProbability) {
  for (int m : {1, 2, 4}) {
    NetworkParams net;
    net.antenna.sector_exp = m;
    const double top = std::numbers::pi / net.antenna.beam_count();
    const double mass = numerics::integrate_1d([&](double x) { return phi_c_pdf(x, net); }, 0.0, top);
    EXPECT_NEAR(mass, 1.0 - net.void_probability(), 1e-10);
  }
}

TEST(NearestDistance, MassIsNonemptyProbability) {
  const NetworkParams net;
  const double mass = numerics::integrate_1d([&](double r) { return nearest_distance_pdf(r, net); }, 0.0, 75.0);
  EXPECT_NEAR(mass, 1.0 - net.void_probability(), 1e-10);
}

TEST(AnalyticP3, MonotoneAndNoiseHurts) {
  NetworkParams net;
  double prev = 1.0;
  for (double gdb : {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0}) {
    const double v = coverage_p3(db_to_linear(gdb), net);
    EXPECT_LE(v, prev + 1e-9);
    prev = v;
  }
  EXPECT_EQ(coverage_p3(0.0, net), 1.0);
  const double with_noise = coverage_p3(1.0, net);
  net.channel.noise = 0.0;
  EXPECT_GE(coverage_p3(1.0, net), with_noise);
  EXPECT_THROW(coverage_p3(-1.0, net), DomainError);
}

TEST(AnalyticP3, AgreesWithSimulation) {
  const NetworkParams net;
  for (double gdb : {-5.0, 0.0, 10.0}) {
    double se = 0.0;
    const double mc = mc_coverage(Policy::kNearest, gdb, 40000, &se);
    EXPECT_NEAR(coverage_p3(db_to_linear(gdb), net), mc, std::max(0.015, 3 * se)) << gdb;
  }
}

TEST(AnalyticP1, AgreesWithSimulation) {
  const NetworkParams net;
  for (double gdb : {-5.0, 5.0}) {
    double se = 0.0;
    const double mc = mc_coverage(Policy::kMaxPower, gdb, 40000, &se);
    EXPECT_NEAR(coverage_p1(db_to_linear(gdb), net), mc, std::max(0.015, 3 * se)) << gdb;
  }
}

TEST(AnalyticP1, ExplicitBeamsMatchCollapsedForm) {
  const NetworkParams net;
  EXPECT_NEAR(coverage_p1_explicit_beams(1.0, net), coverage_p1(1.0, net), 1e-4);
}

TEST(AnalyticP1, PrintedExclusionUnderestimates) {
  const NetworkParams net;
  AnalyticOptions printed;
  printed.p1_exclusion = ExclusionMode::kPrinted;
  EXPECT_LT(coverage_p1(1.0, net, printed), coverage_p1(1.0, net));
}

TEST(AnalyticP2, AgreesWithSimulationAtZeroDb) {
  const NetworkParams net;
  double se = 0.0;
  const double mc = mc_coverage(Policy::kMinAngle, 0.0, 40000, &se);
  EXPECT_NEAR(coverage_p2(1.0, net), mc, std::max(0.015, 3 * se));
}

TEST(AnalyticCurve, LabelsAndRows) {
  const NetworkParams net;
  const auto c = analytic_curve(Policy::kNearest, {0.0, 3.0}, net);
  EXPECT_EQ(c.engine, "analytic");
  EXPECT_EQ(c.policy, "P3");
  ASSERT_EQ(c.rows.size(), 2u);
  EXPECT_EQ(c.rows[0].n, 0u);
  EXPECT_GT(c.rows[0].value, c.rows[1].value);
}
