// SPDX-License-Identifier: Apache-2.0
#pragma once

// Integral-form coverage for the three association policies: the law of the
// maximum received power, conditional interference Laplace transforms over
// the admissible interferer region, and the deconditioning integrals.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <utility>
#include <vector>

#include "mmwcov/curve.hpp"
#include "mmwcov/error.hpp"
#include "mmwcov/numerics/laplace.hpp"
#include "mmwcov/numerics/quadrature.hpp"
#include "mmwcov/params.hpp"
#include "mmwcov/radio.hpp"

namespace mmwcov {

/// Which received power an interferer must stay below under P1.
enum class ExclusionMode {
  kBestBeam,  ///< gain toward the interferer's own best beam (exact conditioning)
  kPrinted,   ///< gain toward the chosen beam only, r_min = (g_3gpp/S_th)^(1/α)
};

/// Admissible interferer azimuths under P2 given the serving offset φ_c.
enum class P2Region {
  kExactWedges,  ///< no BS closer than φ_c to any beam maxima
  kVerbatim,     ///< φ_c ≤ offset from the chosen beam ≤ 2π
};

struct AnalyticOptions {
  numerics::QuadratureSpec outer{1e-6, 1e-10, 2000, 1e-9};
  numerics::QuadratureSpec laplace{1e-8, 1e-12, 2000, 1e-9};
  ExclusionMode p1_exclusion = ExclusionMode::kBestBeam;
  P2Region p2_region = P2Region::kExactWedges;
  InterferenceReference p2_reference = InterferenceReference::kLink;
  /// Divide the deconditioning integrals by the nonempty-ball probability.
  bool renormalize = true;
};

// ---------------------------------------------------------------------------
// Maximum received power S = max over BSs and beams of g·r^-α.

class ServingPowerLaw {
 public:
  explicit ServingPowerLaw(const NetworkParams& net, numerics::QuadratureSpec spec = {1e-10, 1e-14, 2000, 1e-9})
      : cfg_(net.antenna), alpha_(net.channel.alpha), r_(net.channel.r_los), mu_(net.mean_count()), spec_(spec) {
    net.validate();
    half_spacing_ = std::numbers::pi / cfg_.beam_count();
    w_min_ = gain_approx(half_spacing_, cfg_) * std::pow(r_, -alpha_);
  }

  double w_min() const { return w_min_; }
  double mean_count() const { return mu_; }
  double void_mass() const { return std::exp(-mu_); }
  /// Level where g_max·r^-α reaches the ball edge; f_Sx has a kink here.
  double kink() const { return cfg_.g_max() * std::pow(r_, -alpha_); }

  /// P(S_x ≤ w) for one BS uniform in the ball with an offset U[0, π/2^m].
  double inner_cdf(double w) const {
    if (w < w_min_) return 0.0;
    const double lo = lowest_offset(w);
    if (lo >= half_spacing_) return 0.0;
    auto f = [&](double phi) {
      const double q = std::pow(gain_approx(phi, cfg_) / w, 2.0 / alpha_) / (r_ * r_);
      return std::max(0.0, 1.0 - q);
    };
    return numerics::integrate_1d(f, lo, half_spacing_, spec_) / half_spacing_;
  }

  /// Density of S_x (single BS).
  double inner_pdf(double w) const {
    if (w < w_min_) return 0.0;
    const double lo = lowest_offset(w);
    if (lo >= half_spacing_) return 0.0;
    auto f = [&](double phi) {
      return (2.0 / alpha_) * std::pow(gain_approx(phi, cfg_) / w, 2.0 / alpha_) / (r_ * r_ * w);
    };
    return numerics::integrate_1d(f, lo, half_spacing_, spec_) / half_spacing_;
  }

  /// Inner density written as a gain-domain integral against the mainlobe gain pdf.
  /// Valid when the beam half-spacing equals φ_3dB/2.
  double inner_pdf_gain_domain(double w) const {
    if (w < w_min_) return 0.0;
    const double g3 = cfg_.g_3db();
    const double upper = std::min(w * std::pow(r_, alpha_), cfg_.g_max());
    if (!(upper > g3)) return 0.0;
    // x = upper - t² removes the inverse-square-root singularity of the gain pdf at g_max.
    const double span = std::sqrt(upper - g3);
    auto f = [&](double t) {
      const double x = upper - t * t;
      const double y = w / x;
      const double f_pl = 2.0 * std::pow(1.0 / y, (alpha_ + 2.0) / alpha_) / (alpha_ * r_ * r_);
      return 2.0 * t * gain_pdf_mainlobe(x, cfg_) * f_pl / x;
    };
    return numerics::integrate_1d(f, 0.0, span, spec_);
  }

  /// F_S(w) = exp(-μ(1 - F_Sx(w))); equals the void mass e^-μ at w_min.
  double cdf(double w) const {
    if (w < w_min_) return void_mass();
    return std::exp(-mu_ * (1.0 - inner_cdf(w)));
  }
  double ccdf(double w) const { return -std::expm1(-mu_ * (1.0 - inner_cdf(w))); }

  double pdf(double w) const {
    if (w < w_min_) return 0.0;
    return mu_ * inner_pdf(w) * std::exp(-mu_ * (1.0 - inner_cdf(w)));
  }

  /// Level above which 1 - F_S < eps.
  double upper_level(double eps) const {
    return cfg_.g_max() * std::pow(mu_ / (eps * r_ * r_), alpha_ / 2.0);
  }

 private:
  // Smallest offset at which the radius (g/w)^(1/α) giving S_x = w fits in the ball.
  double lowest_offset(double w) const {
    const double g_needed = w * std::pow(r_, alpha_);
    if (g_needed >= cfg_.g_max()) return 0.0;
    return mainlobe_offset_for_gain(g_needed, cfg_);
  }

  AntennaConfig cfg_;
  double alpha_, r_, mu_;
  numerics::QuadratureSpec spec_;
  double half_spacing_ = 0.0;
  double w_min_ = 0.0;
};

// ---------------------------------------------------------------------------
// Interference Laplace transforms.

/// Admissible interferer positions: azimuth arcs, and per azimuth the radial
/// range [r_min(φ), R_L]. `weight` multiplies the integral (2 when only one
/// mirror half of a symmetric region is listed).
struct InterferenceRegion {
  std::vector<std::pair<double, double>> arcs;
  double weight = 1.0;
  std::function<double(double)> gain;   ///< receive gain toward azimuth φ
  std::function<double(double)> r_min;  ///< inner radius at azimuth φ
  std::vector<double> breaks;           ///< azimuths where gain or r_min has kinks
};

namespace detail {

inline double rising_factorial(double m, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= m + i;
  return r;
}

// k-th s-derivative of -(1 - (1 + s·a/m)^-m).
inline double interference_kernel(double s, double a, double m, int k) {
  const double x = s * a / m;
  if (k == 0) return std::expm1(-m * std::log1p(x));
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * rising_factorial(m, k) * std::pow(a / m, k) * std::exp((-m - k) * std::log1p(x));
}

}  // namespace detail

/// L_I(s) = exp(F(s)) with F(s) = λ·weight·∫∫ kernel r dr dφ; F^(k) by
/// differentiating the kernel under the integral sign. Noise is not included.
inline numerics::LaplaceEvaluator interference_laplace(InterferenceRegion region, const NetworkParams& net,
                                                       int max_order, const numerics::QuadratureSpec& spec = {
                                                                          1e-8, 1e-12, 2000, 1e-9}) {
  auto reg = std::make_shared<InterferenceRegion>(std::move(region));
  const double c = net.channel.p_tx * net.channel.path_loss_constant() * net.antenna.g_max();
  const double alpha = net.channel.alpha;
  const double r_los = net.channel.r_los;
  const double m = net.channel.m_x;
  const double lambda = net.density;
  numerics::LaplaceEvaluator lt;
  lt.max_order = max_order;
  lt.exponent = [reg, c, alpha, r_los, m, lambda, spec, max_order](double s, int k) -> double {
    if (k < 0 || k > max_order) throw DomainError("interference_laplace: derivative order out of range");
    if (s == 0.0 && k == 0) return 0.0;
    const numerics::QuadratureSpec inner = spec.tightened();
    auto radial = [&](double phi) {
      const double lo = std::clamp(reg->r_min(phi), 0.0, r_los);
      if (!(lo < r_los)) return 0.0;
      const double a_unit = c * reg->gain(phi);
      auto f = [&](double r) { return detail::interference_kernel(s, a_unit * std::pow(r, -alpha), m, k) * r; };
      // s·a/m = 1 marks where the kernel turns from saturated to linear.
      const double rc = std::pow(s * a_unit / m, 1.0 / alpha);
      const double br[1] = {rc};
      return numerics::integrate_1d(f, lo, r_los, inner, std::span<const double>(br, (rc > lo && rc < r_los) ? 1 : 0));
    };
    double acc = 0.0;
    for (const auto& [a, b] : reg->arcs) {
      if (!(b > a)) continue;
      std::vector<double> local;
      for (double x : reg->breaks)
        if (x > a && x < b) local.push_back(x);
      acc += numerics::integrate_1d(radial, a, b, spec, local);
    }
    return lambda * reg->weight * acc;
  };
  return lt;
}

/// L_tot(s) = exp(-σ² s)·L(s).
inline numerics::LaplaceEvaluator with_noise(numerics::LaplaceEvaluator lt, double noise) {
  auto base = std::move(lt.exponent);
  lt.exponent = [base, noise](double s, int k) {
    const double v = base(s, k);
    if (k == 0) return v - noise * s;
    if (k == 1) return v - noise;
    return v;
  };
  return lt;
}

namespace detail {

// Distance from ψ to the nearest multiple of `step`.
inline double offset_to_grid(double psi, double step) {
  return std::abs(psi - step * std::round(psi / step));
}

inline double floor_offset(const AntennaConfig& cfg) { return cfg.phi_3db() * std::sqrt(cfg.sla_db / 12.0); }

// Offsets in [0, π] where r_min reaches R_L (mainlobe gain equals S·R^α).
inline double edge_offset(double s_th, const NetworkParams& net) {
  const double g = s_th * std::pow(net.channel.r_los, net.channel.alpha);
  if (g >= net.antenna.g_max()) return 0.0;
  if (g <= net.antenna.g_s()) return std::numbers::pi;
  return mainlobe_offset_for_gain(g, net.antenna);
}

inline void add_grid_breaks(std::vector<double>& br, double lo, double hi, double origin, double step,
                            std::initializer_list<double> shifts) {
  const int kmin = static_cast<int>(std::floor((lo - origin) / step)) - 1;
  const int kmax = static_cast<int>(std::ceil((hi - origin) / step)) + 1;
  for (int k = kmin; k <= kmax; ++k)
    for (double d : shifts) {
      const double x = origin + k * step + d;
      if (x > lo && x < hi) br.push_back(x);
    }
}

}  // namespace detail

/// Conditional Laplace transform of P1 interference given S = S_th and the
/// chosen beam, in absolute azimuth over the full circle.
inline numerics::LaplaceEvaluator laplace_p1(double s_th, double beam_direction, const NetworkParams& net,
                                             const AnalyticOptions& opt = {}) {
  const auto& cfg = net.antenna;
  const double alpha = net.channel.alpha;
  InterferenceRegion reg;
  reg.arcs = {{0.0, kTwoPi}};
  reg.gain = [cfg, beam_direction](double phi) { return gain_3gpp(angular_distance(phi, beam_direction), cfg); };
  if (opt.p1_exclusion == ExclusionMode::kBestBeam) {
    reg.r_min = [cfg, s_th, alpha](double phi) {
      return std::pow(gain_approx(nearest_beam_offset(phi, cfg), cfg) / s_th, 1.0 / alpha);
    };
  } else {
    reg.r_min = [cfg, s_th, alpha, beam_direction](double phi) {
      return std::pow(gain_3gpp(angular_distance(phi, beam_direction), cfg) / s_th, 1.0 / alpha);
    };
  }
  const double step = kTwoPi / cfg.beam_count();
  const double fl = detail::floor_offset(cfg);
  const double eo = detail::edge_offset(s_th, net);
  detail::add_grid_breaks(reg.breaks, 0.0, kTwoPi, std::numbers::pi / cfg.beam_count(), step,
                          {0.0, 0.5 * step, eo, -eo});
  for (double d : {fl, -fl, eo, -eo}) reg.breaks.push_back(wrap_angle(beam_direction + d));
  reg.breaks.push_back(wrap_angle(beam_direction));
  return interference_laplace(std::move(reg), net, net.channel.m_s - 1, opt.laplace);
}

/// Same transform in the frame of the chosen beam, integrating one mirror half.
inline numerics::LaplaceEvaluator laplace_p1_collapsed(double s_th, const NetworkParams& net,
                                                       const AnalyticOptions& opt = {}) {
  const auto& cfg = net.antenna;
  const double alpha = net.channel.alpha;
  const double step = kTwoPi / cfg.beam_count();
  InterferenceRegion reg;
  reg.arcs = {{0.0, std::numbers::pi}};
  reg.weight = 2.0;
  reg.gain = [cfg](double psi) { return gain_3gpp(psi, cfg); };
  if (opt.p1_exclusion == ExclusionMode::kBestBeam) {
    reg.r_min = [cfg, s_th, alpha, step](double psi) {
      return std::pow(gain_approx(detail::offset_to_grid(psi, step), cfg) / s_th, 1.0 / alpha);
    };
  } else {
    reg.r_min = [cfg, s_th, alpha](double psi) { return std::pow(gain_3gpp(psi, cfg) / s_th, 1.0 / alpha); };
  }
  const double eo = detail::edge_offset(s_th, net);
  detail::add_grid_breaks(reg.breaks, 0.0, std::numbers::pi, 0.0, step, {0.5 * step, eo, -eo});
  reg.breaks.push_back(detail::floor_offset(cfg));
  return interference_laplace(std::move(reg), net, net.channel.m_s - 1, opt.laplace);
}

namespace detail {

inline double nonempty_scale(const NetworkParams& net, const AnalyticOptions& opt) {
  return opt.renormalize ? 1.0 / (-std::expm1(-net.mean_count())) : 1.0;
}

}  // namespace detail

/// P(SINR > γ | S = S_th) under P1.
inline double conditional_coverage_p1(double gamma, double s_th, const NetworkParams& net,
                                      const AnalyticOptions& opt = {}) {
  const double s = net.channel.m_s * gamma /
                   (net.channel.p_tx * net.antenna.g_max() * net.channel.path_loss_constant() * s_th);
  const auto lt = with_noise(laplace_p1_collapsed(s_th, net, opt), net.channel.noise);
  return numerics::gamma_ccdf_mixture(lt, s, net.channel.m_s);
}

/// Coverage under maximum-power association: deconditioning over the law of S.
inline double coverage_p1(double gamma, const NetworkParams& net, const AnalyticOptions& opt = {}) {
  net.validate();
  if (!(gamma >= 0.0)) throw DomainError("coverage_p1: gamma must be >= 0");
  if (gamma == 0.0) return 1.0;
  const ServingPowerLaw law(net);
  const double t0 = std::log(law.w_min());
  const double t1 = std::log(law.upper_level(1e-8));
  auto f = [&](double t) {
    const double w = std::exp(t);
    const double pdf = law.pdf(w);
    if (pdf == 0.0) return 0.0;
    return conditional_coverage_p1(gamma, w, net, opt) * pdf * w;
  };
  const double br[1] = {std::log(law.kink())};
  const double v = numerics::integrate_1d(f, t0, t1, opt.outer, std::span<const double>(br, 1));
  return std::clamp(v * detail::nonempty_scale(net, opt), 0.0, 1.0);
}

/// Coverage under P1 summing the beam terms explicitly in absolute azimuth.
inline double coverage_p1_explicit_beams(double gamma, const NetworkParams& net, const AnalyticOptions& opt = {}) {
  net.validate();
  if (gamma == 0.0) return 1.0;
  const ServingPowerLaw law(net);
  const auto beams = beam_maxima_pmf(net.antenna);
  const double t0 = std::log(law.w_min());
  const double t1 = std::log(law.upper_level(1e-8));
  const double c = net.channel.p_tx * net.antenna.g_max() * net.channel.path_loss_constant();
  double total = 0.0;
  for (const auto& b : beams) {
    auto f = [&](double t) {
      const double w = std::exp(t);
      const double pdf = law.pdf(w);
      if (pdf == 0.0) return 0.0;
      const double s = net.channel.m_s * gamma / (c * w);
      const auto lt = with_noise(laplace_p1(w, b.direction, net, opt), net.channel.noise);
      return numerics::gamma_ccdf_mixture(lt, s, net.channel.m_s) * pdf * w;
    };
    const double br[1] = {std::log(law.kink())};
    total += b.probability * numerics::integrate_1d(f, t0, t1, opt.outer, std::span<const double>(br, 1));
  }
  return std::clamp(total * detail::nonempty_scale(net, opt), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// P2: minimum angular distance.

/// Density of the smallest offset φ_c between any BS and any beam maxima,
/// not renormalized (its mass is 1 - e^-λπR²).
inline double phi_c_pdf(double phi_c, const NetworkParams& net) {
  const int n = net.antenna.beam_count();
  if (phi_c < 0.0 || phi_c > std::numbers::pi / n) return 0.0;
  const double c = net.density * n * net.channel.r_los * net.channel.r_los;
  return c * std::exp(-c * phi_c);
}

/// Conditional Laplace transform of P2 interference given φ_c, in absolute
/// azimuth. The serving BS sits at beam_direction + φ_c.
inline numerics::LaplaceEvaluator laplace_p2(double phi_c, double beam_direction, const NetworkParams& net,
                                             const AnalyticOptions& opt = {}) {
  const auto& cfg = net.antenna;
  const int n = cfg.beam_count();
  const double step = kTwoPi / n;
  InterferenceRegion reg;
  const double ref = opt.p2_reference == InterferenceReference::kLink ? beam_direction + phi_c : beam_direction;
  reg.gain = [cfg, ref](double phi) { return gain_3gpp(angular_distance(phi, ref), cfg); };
  reg.r_min = [](double) { return 0.0; };
  if (opt.p2_region == P2Region::kExactWedges) {
    // Gaps between the exclusion wedges, starting at the chosen beam.
    for (int k = 0; k < n; ++k) {
      const double a = beam_direction + k * step + phi_c;
      const double b = beam_direction + (k + 1) * step - phi_c;
      if (b > a) reg.arcs.emplace_back(a, b);
    }
  } else {
    reg.arcs = {{beam_direction + phi_c, beam_direction + kTwoPi}};
  }
  const double fl = detail::floor_offset(cfg);
  for (int k = -1; k <= 1; ++k)
    for (double d : {fl, -fl, 0.0, std::numbers::pi}) reg.breaks.push_back(ref + k * kTwoPi + d);
  return interference_laplace(std::move(reg), net, net.channel.m_s - 1, opt.laplace);
}

/// P(SINR > γ | φ_c, d₀) under P2 (beam symmetry: the chosen beam is placed at 0).
inline double conditional_coverage_p2(double gamma, double phi_c, double d0, const NetworkParams& net,
                                      const AnalyticOptions& opt = {}) {
  const double sig = net.channel.p_tx * net.antenna.g_max() * net.channel.path_loss_constant() *
                     gain_approx(phi_c, net.antenna) * std::pow(d0, -net.channel.alpha);
  const double s = net.channel.m_s * gamma / sig;
  const auto lt = with_noise(laplace_p2(phi_c, 0.0, net, opt), net.channel.noise);
  return numerics::gamma_ccdf_mixture(lt, s, net.channel.m_s);
}

/// Coverage under minimum-angular-distance association: φ_c with the
/// smallest-offset law, serving distance uniform in the ball.
inline double coverage_p2(double gamma, const NetworkParams& net, const AnalyticOptions& opt = {}) {
  net.validate();
  if (!(gamma >= 0.0)) throw DomainError("coverage_p2: gamma must be >= 0");
  if (gamma == 0.0) return 1.0;
  const double r_los = net.channel.r_los;
  const double top = std::numbers::pi / net.antenna.beam_count();
  const numerics::QuadratureSpec mid = opt.outer.tightened(0.1);
  auto over_phi = [&](double phi_c) {
    auto over_d = [&](double d0) {
      if (d0 <= 0.0) return 0.0;
      return conditional_coverage_p2(gamma, phi_c, d0, net, opt) * 2.0 * d0 / (r_los * r_los);
    };
    return numerics::integrate_1d(over_d, 0.0, r_los, mid) * phi_c_pdf(phi_c, net);
  };
  const double v = numerics::integrate_1d(over_phi, 0.0, top, opt.outer);
  return std::clamp(v * detail::nonempty_scale(net, opt), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// P3: nearest BS, perfect alignment.

inline numerics::LaplaceEvaluator laplace_p3(double r1, const NetworkParams& net, const AnalyticOptions& opt = {}) {
  const auto& cfg = net.antenna;
  InterferenceRegion reg;
  reg.arcs = {{0.0, std::numbers::pi}};
  reg.weight = 2.0;
  reg.gain = [cfg](double psi) { return gain_3gpp(psi, cfg); };
  reg.r_min = [r1](double) { return r1; };
  reg.breaks = {detail::floor_offset(cfg)};
  return interference_laplace(std::move(reg), net, net.channel.m_s - 1, opt.laplace);
}

/// Nearest-BS distance density 2πλr e^{-λπr²}, not renormalized.
inline double nearest_distance_pdf(double r, const NetworkParams& net) {
  if (r < 0.0 || r > net.channel.r_los) return 0.0;
  const double pl = std::numbers::pi * net.density;
  return 2.0 * pl * r * std::exp(-pl * r * r);
}

inline double conditional_coverage_p3(double gamma, double r1, const NetworkParams& net,
                                      const AnalyticOptions& opt = {}) {
  const double g = net.antenna.g_max();
  const double s = net.channel.m_s * gamma * std::pow(r1, net.channel.alpha) /
                   (net.channel.p_tx * net.channel.path_loss_constant() * g * g);
  const auto lt = with_noise(laplace_p3(r1, net, opt), net.channel.noise);
  return numerics::gamma_ccdf_mixture(lt, s, net.channel.m_s);
}

inline double coverage_p3(double gamma, const NetworkParams& net, const AnalyticOptions& opt = {}) {
  net.validate();
  if (!(gamma >= 0.0)) throw DomainError("coverage_p3: gamma must be >= 0");
  if (gamma == 0.0) return 1.0;
  auto f = [&](double r1) {
    if (r1 <= 0.0) return 0.0;
    return conditional_coverage_p3(gamma, r1, net, opt) * nearest_distance_pdf(r1, net);
  };
  const double v = numerics::integrate_1d(f, 0.0, net.channel.r_los, opt.outer);
  return std::clamp(v * detail::nonempty_scale(net, opt), 0.0, 1.0);
}

inline double analytic_coverage(Policy policy, double gamma, const NetworkParams& net,
                                const AnalyticOptions& opt = {}) {
  switch (policy) {
    case Policy::kMaxPower: return coverage_p1(gamma, net, opt);
    case Policy::kMinAngle: return coverage_p2(gamma, net, opt);
    case Policy::kNearest: return coverage_p3(gamma, net, opt);
  }
  throw DomainError("analytic_coverage: unknown policy");
}

inline CoverageCurve analytic_curve(Policy policy, const std::vector<double>& thresholds_db, const NetworkParams& net,
                                    const AnalyticOptions& opt = {}) {
  CoverageCurve c{"analytic", std::string(policy_tag(policy)), {}};
  for (double gdb : thresholds_db) c.rows.push_back({gdb, analytic_coverage(policy, db_to_linear(gdb), net, opt), 0.0, 0});
  return c;
}

}  // namespace mmwcov
