// SPDX-License-Identifier: Apache-2.0
#pragma once

// Single-dominant-interferer SIR laws. P2: the serving and interfering BSs
// are the two smallest absolute angles from the beam maxima, both inside the
// mainlobe (|φ| < φ_A). P3: the two nearest BSs, the interferer seen at a
// relative angle uniform on [0, φ_A]. SIR = G·W in both cases; noise is
// ignored.
//
// Several printed forms are kept next to the corrected ones so their effect
// can be reported: the positive exponent and g_s/g lower limit of the P2
// gain-ratio law, the constant of the P3 distance-ratio law, and the
// W-with-W pairing of the P3 coverage integral.

#include <cmath>
#include <numbers>

#include "mmwcov/curve.hpp"
#include "mmwcov/error.hpp"
#include "mmwcov/numerics/quadrature.hpp"
#include "mmwcov/numerics/special.hpp"
#include "mmwcov/params.hpp"
#include "mmwcov/radio.hpp"

namespace mmwcov {

struct DominantOptions {
  numerics::QuadratureSpec spec{1e-8, 1e-12, 2000, 1e-10};
};

// ---------------------------------------------------------------------------
// P2, gain ratio G = g(|φ₁|)/g(|φ₂|).

/// P(|φ₁| < φ_A, |φ₂| < φ_A) for the two smallest absolute angles in the ball.
inline double mainlobe_pair_probability(const NetworkParams& net) {
  const double c = net.density * net.channel.r_los * net.channel.r_los * net.antenna.phi_a();
  return 1.0 - std::exp(-c) * (1.0 + c);
}

namespace detail {

// Log-scale span used for the W ratio integrals, in units of R^-α.
inline constexpr double kLogSpan = 60.0;

// Mainlobe exponent κ in g(φ) = g_max·10^(-κ φ²).
inline double mainlobe_kappa(const AntennaConfig& cfg) {
  const double f = cfg.phi_3db();
  return 1.2 / (f * f);
}

}  // namespace detail

/// Density of log10 G on [0, log10(g_max/g_s)], both angles inside the mainlobe.
/// Evaluated in angle space with φ₁ = a·sinh u, φ₂ = a·cosh u, a² = t/κ.
inline double gain_ratio_log10_pdf_p2(double t, const NetworkParams& net, const DominantOptions& opt = {}) {
  const auto& cfg = net.antenna;
  if (!(t >= 0.0)) return 0.0;
  if (t == 0.0) return std::numeric_limits<double>::infinity();
  const double kappa = detail::mainlobe_kappa(cfg);
  const double phi_a = cfg.phi_a();
  const double a = std::sqrt(t / kappa);
  if (!(a < phi_a)) return 0.0;
  const double c = net.density * net.channel.r_los * net.channel.r_los;
  const double top = std::asinh(std::sqrt(phi_a * phi_a - a * a) / a);
  auto f = [&](double u) { return std::exp(-c * a * std::cosh(u)); };
  const double integral = numerics::integrate_1d(f, 0.0, top, opt.spec);
  return c * c * integral / (2.0 * kappa * mainlobe_pair_probability(net));
}

/// Density of G on [1, g_max/g_s], conditioned on both angles inside the mainlobe.
inline double gain_ratio_pdf_p2(double g, const NetworkParams& net, const DominantOptions& opt = {}) {
  if (!(g >= 1.0)) return 0.0;
  return gain_ratio_log10_pdf_p2(std::log10(g), net, opt) / (g * std::log(10.0));
}

/// Gain-domain form: ∫ g₂·f(g·g₂, g₂) dg₂ with the joint gain density written
/// out. `printed` uses a positive exponent and the lower limit g_s/g; the
/// corrected form has exp(-λR²φ(g₂)) and lower limit g_s.
inline double gain_ratio_pdf_p2_gain_domain(double g, const NetworkParams& net, bool printed,
                                            const DominantOptions& opt = {}) {
  const auto& cfg = net.antenna;
  const double gmax = cfg.g_max(), gs = cfg.g_s();
  if (!(g >= 1.0) || !(g <= gmax / gs)) return 0.0;
  if (g == 1.0) return std::numeric_limits<double>::infinity();
  const double c = net.density * net.channel.r_los * net.channel.r_los;
  const double f3 = cfg.phi_3db();
  const double ln10 = std::log(10.0);
  const double lo = printed ? gs / g : gs;
  const double hi = gmax / g;
  if (!(hi > lo)) return 0.0;
  // g₂ = (g_max/g)·10^(-v²) puts the inverse-square-root endpoint at v = 0.
  const double vmax = std::sqrt(std::log10(hi / lo));
  const double sign = printed ? 1.0 : -1.0;
  auto f = [&](double v) {
    const double g2 = hi * std::pow(10.0, -v * v);
    const double l1 = v * v;                   // log10(g_max/(g·g₂))
    const double l2 = std::log10(gmax / g2);  // log10(g_max/g₂)
    const double jac = g2 * 2.0 * v * ln10;   // |dg₂/dv|
    const double coeff = 5.0 * (c * f3) * (c * f3) / (24.0 * g * g2 * g2);
    if (l1 == 0.0) {
      // √l₁/(ln10·l₁)·2v·ln10 → 2 as v → 0.
      return g2 * coeff * std::sqrt(l2) / (ln10 * l2) * 2.0 * g2 *
             std::exp(sign * c * f3 * std::sqrt(10.0 * l2) / (2.0 * std::sqrt(3.0)));
    }
    const double shape = std::sqrt(l1 * l2) / (ln10 * l1 * ln10 * l2);
    return g2 * coeff * shape * std::exp(sign * c * f3 * std::sqrt(10.0 * l2) / (2.0 * std::sqrt(3.0))) * jac;
  };
  return numerics::integrate_1d(f, 0.0, vmax, opt.spec) / mainlobe_pair_probability(net);
}

// ---------------------------------------------------------------------------
// P2, path-loss and fading ratio W = h₁d₁^-α / (h₂d₂^-α), d uniform in the ball.

/// Density of h·d^-α for one link with Nakagami shape m.
inline double fade_pathloss_pdf(double w, int m, const NetworkParams& net) {
  if (!(w > 0.0)) return 0.0;
  const double a = net.channel.alpha, r = net.channel.r_los;
  const double e = 2.0 / a;
  const double x = m * w * std::pow(r, a);
  const double p = numerics::special_gamma_p(e + m, x);
  if (p == 0.0) return 0.0;
  return std::exp(std::log(2.0) - e * std::log(static_cast<double>(m)) - (e + 1.0) * std::log(w) + std::log(p) +
                  std::lgamma(e + m) - std::log(a * r * r) - std::lgamma(m));
}

/// Cdf of h·d^-α for one link.
inline double fade_pathloss_cdf(double w, int m, const NetworkParams& net) {
  if (!(w > 0.0)) return 0.0;
  const double a = net.channel.alpha, r = net.channel.r_los;
  const double e = 2.0 / a;
  const double x = m * w * std::pow(r, a);
  const double p = numerics::special_gamma_p(m + e, x);
  if (p == 0.0) return 0.0;
  const double tail = std::exp(-e * std::log(w) - 2.0 * std::log(r) + std::log(p) + std::lgamma(m + e) -
                               std::lgamma(m) - e * std::log(static_cast<double>(m)));
  return std::clamp(numerics::special_gamma_p(m, x) - tail, 0.0, 1.0);
}

inline double pathloss_fade_ratio_pdf_p2(double w, const NetworkParams& net, const DominantOptions& opt = {}) {
  if (!(w > 0.0)) return 0.0;
  const int ms = net.channel.m_s, mx = net.channel.m_x;
  const double scale = std::pow(net.channel.r_los, -net.channel.alpha);
  // w₂ = scale·e^t.
  auto f = [&](double t) {
    const double w2 = scale * std::exp(t);
    return w2 * w2 * fade_pathloss_pdf(w * w2, ms, net) * fade_pathloss_pdf(w2, mx, net);
  };
  const double brk[] = {0.0, -std::log(w)};
  return numerics::integrate_1d(f, -detail::kLogSpan, detail::kLogSpan, opt.spec, brk);
}

/// Printed integrand of the W density with the two incomplete-gamma brackets.
inline double pathloss_fade_ratio_pdf_p2_bracket_form(double w, const NetworkParams& net,
                                                      const DominantOptions& opt = {}) {
  if (!(w > 0.0)) return 0.0;
  const int ms = net.channel.m_s, mx = net.channel.m_x;
  const double a = net.channel.alpha, r = net.channel.r_los;
  const double e = 2.0 / a;
  const double scale = std::pow(r, -a);
  auto f = [&](double t) {
    const double w2 = scale * std::exp(t);
    const double b1 = numerics::special_gamma(e + ms) - numerics::special_gamma_upper(e + ms, ms * w * w2 / scale);
    const double b2 = numerics::special_gamma(e + mx) - numerics::special_gamma_upper(e + mx, mx * w2 / scale);
    const double pre = 4.0 * std::pow(w2, -2.0 * e - 1.0) * std::pow(static_cast<double>(ms) * mx, -e) /
                       (std::pow(w, e + 1.0) * a * a * std::pow(r, 4.0));
    return w2 * pre * b1 * b2 / (numerics::special_gamma(ms) * numerics::special_gamma(mx));
  };
  const double brk[] = {0.0, -std::log(w)};
  return numerics::integrate_1d(f, -detail::kLogSpan, detail::kLogSpan, opt.spec, brk);
}

inline double pathloss_fade_ratio_cdf_p2(double w, const NetworkParams& net, const DominantOptions& opt = {}) {
  if (!(w > 0.0)) return 0.0;
  const int ms = net.channel.m_s, mx = net.channel.m_x;
  const double scale = std::pow(net.channel.r_los, -net.channel.alpha);
  auto f = [&](double t) {
    const double w2 = scale * std::exp(t);
    return w2 * fade_pathloss_pdf(w2, mx, net) * fade_pathloss_cdf(w * w2, ms, net);
  };
  const double brk[] = {0.0, -std::log(w)};
  return numerics::integrate_1d(f, -detail::kLogSpan, detail::kLogSpan, opt.spec, brk);
}

/// 1 - P(G·W ≤ γ) = 1 - ∫ f_G(g) F_W(γ/g) dg, integrated in log10 g.
inline double coverage_dom_p2(double gamma, const NetworkParams& net, const DominantOptions& opt = {}) {
  net.validate();
  if (!(gamma >= 0.0)) throw DomainError("coverage_dom_p2: gamma must be >= 0");
  if (gamma == 0.0) return 1.0;
  const auto& cfg = net.antenna;
  const double tmax = std::log10(cfg.g_max() / cfg.g_s());
  numerics::QuadratureSpec outer = opt.spec;
  outer.rel_tol = std::max(outer.rel_tol, 1e-7);
  DominantOptions inner = opt;
  inner.spec = outer.tightened();
  auto f = [&](double t) {
    if (t <= 0.0) return 0.0;
    return gain_ratio_log10_pdf_p2(t, net, inner) * pathloss_fade_ratio_cdf_p2(gamma * std::pow(10.0, -t), net, inner);
  };
  const double v = numerics::integrate_1d(f, 0.0, tmax, outer);
  return std::clamp(1.0 - v, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// P3, gain-fading ratio G = g_max·h₁/(g(|φ₂|)·h₂), |φ₂| ~ U[0, φ_A].

/// Density of the interferer gain g(|φ₂|) on [g_s, g_max].
inline double interferer_gain_pdf_p3(double g, const NetworkParams& net) {
  const auto& cfg = net.antenna;
  if (!(g >= cfg.g_s()) || !(g <= cfg.g_max())) return 0.0;
  const double l = std::log10(cfg.g_max() / g);
  if (l <= 0.0) return std::numeric_limits<double>::infinity();
  return 5.0 * std::sqrt(3.0) * cfg.phi_3db() /
         (6.0 * std::sqrt(10.0) * std::log(10.0) * cfg.phi_a() * g * std::sqrt(l));
}

namespace detail {

// Density and cdf of h₁/h₂ for unit-mean Gamma fades.
inline double fade_ratio_pdf(double t, int ms, int mx) {
  if (!(t > 0.0)) return 0.0;
  const double lb = std::lgamma(ms) + std::lgamma(mx) - std::lgamma(ms + mx);
  return std::exp(ms * std::log(static_cast<double>(ms)) + mx * std::log(static_cast<double>(mx)) +
                  (ms - 1) * std::log(t) - lb - (ms + mx) * std::log(ms * t + mx));
}

inline double fade_ratio_cdf(double t, int ms, int mx) {
  if (!(t > 0.0)) return 0.0;
  return numerics::special_ibeta(ms, mx, ms * t / (ms * t + mx));
}

}  // namespace detail

inline double gain_fade_ratio_pdf_p3(double g, const NetworkParams& net, const DominantOptions& opt = {}) {
  if (!(g > 0.0)) return 0.0;
  const auto& cfg = net.antenna;
  const double phi_a = cfg.phi_a();
  const double gmax = cfg.g_max();
  auto f = [&](double phi) {
    const double r = gain_approx(phi, cfg) / gmax;
    return r * detail::fade_ratio_pdf(g * r, net.channel.m_s, net.channel.m_x);
  };
  return numerics::integrate_1d(f, 0.0, phi_a, opt.spec) / phi_a;
}

inline double gain_fade_ratio_cdf_p3(double g, const NetworkParams& net, const DominantOptions& opt = {}) {
  if (!(g > 0.0)) return 0.0;
  const auto& cfg = net.antenna;
  const double phi_a = cfg.phi_a();
  const double gmax = cfg.g_max();
  auto f = [&](double phi) {
    return detail::fade_ratio_cdf(g * gain_approx(phi, cfg) / gmax, net.channel.m_s, net.channel.m_x);
  };
  return numerics::integrate_1d(f, 0.0, phi_a, opt.spec) / phi_a;
}

/// Printed double-integral form of the P3 gain-fading density.
inline double gain_fade_ratio_pdf_p3_double_integral(double g, const NetworkParams& net,
                                                     const DominantOptions& opt = {}) {
  if (!(g > 0.0)) return 0.0;
  const auto& cfg = net.antenna;
  const int ms = net.channel.m_s, mx = net.channel.m_x;
  const double gmax = cfg.g_max(), gs = cfg.g_s();
  const double ln10 = std::log(10.0);
  const double coeff = 5.0 * std::sqrt(3.0) * std::pow(ms / gmax, ms) * std::pow(static_cast<double>(mx), mx) *
                       cfg.phi_3db() /
                       (6.0 * std::sqrt(10.0) * ln10 * numerics::special_gamma(ms) * numerics::special_gamma(mx) *
                        cfg.phi_a());
  const double vmax = std::sqrt(std::log10(gmax / gs));
  const numerics::QuadratureSpec inner = opt.spec.tightened();
  // Inner variable x = (z/g_max)·10^(v²): log10(x·g_max/z) = v², dx = 2 ln10·v·x dv.
  auto over_z = [&](double t) {
    const double z = std::exp(t);
    auto over_v = [&](double v) {
      const double x = z / gmax * std::pow(10.0, v * v);
      const double body = std::exp((ms - 1) * std::log(g * z) - ms * g * z / gmax - mx * x + (mx - 1) * std::log(x));
      return body * 2.0 * ln10 * x;  // 1/√(v²) · 2 ln10 · v · x
    };
    return numerics::integrate_1d(over_v, 0.0, vmax, inner) * z;
  };
  // z concentrates around g_max/g; beyond a few e-folds above it the integrand is exp(-e^k).
  const double centre = std::log(gmax / g);
  const double brk[] = {centre};
  return coeff * numerics::integrate_1d(over_z, centre - detail::kLogSpan, centre + 6.0, opt.spec, brk);
}

// ---------------------------------------------------------------------------
// P3, distance ratio W = (r₂/r₁)^α of the two nearest BSs.

/// Density obtained from the joint law of the two smallest radii,
/// conditioned on at least two BSs in the ball: (2/α)·w^(-1-2/α) on [1, ∞).
inline double distance_ratio_pdf_p3(double w, const NetworkParams& net) {
  if (!(w >= 1.0)) return 0.0;
  const double a = net.channel.alpha;
  return (2.0 / a) * std::pow(w, -1.0 - 2.0 / a);
}

inline double distance_ratio_cdf_p3(double w, const NetworkParams& net) {
  if (!(w >= 1.0)) return 0.0;
  return 1.0 - std::pow(w, -2.0 / net.channel.alpha);
}

/// Same density by quadrature of the joint radius law: v = r₁/r₂ = w^(-1/α).
inline double distance_ratio_pdf_p3_from_joint(double w, const NetworkParams& net, const DominantOptions& opt = {}) {
  if (!(w >= 1.0)) return 0.0;
  const double a = net.channel.alpha, r = net.channel.r_los;
  const double pl = std::numbers::pi * net.density;
  const double v = std::pow(w, -1.0 / a);
  const double mu = net.mean_count();
  const double p2 = 1.0 - std::exp(-mu) * (1.0 + mu);
  auto f = [&](double r2) {
    const double r1 = v * r2;
    return 4.0 * pl * pl * r1 * r2 * std::exp(-pl * r2 * r2) * r2;
  };
  const double fv = numerics::integrate_1d(f, 0.0, r, opt.spec) / p2;
  return fv * (1.0 / a) * std::pow(w, -1.0 / a - 1.0);
}

/// Printed closed form with the erf/exponential constant.
inline double distance_ratio_pdf_p3_printed(double w, const NetworkParams& net) {
  if (!(w >= 1.0)) return 0.0;
  const double a = net.channel.alpha, r = net.channel.r_los, l = net.density;
  const double pi = std::numbers::pi;
  const double bracket = 3.0 * numerics::special_erf(std::sqrt(pi * l)) / (2.0 * l) -
                         2.0 * (1.0 + r * r * l * pi) * std::exp(-r * r * l * pi) - std::exp(-l * pi);
  return std::pow(1.0 / w, (2.0 + a) / a) * bracket / a;
}

/// Total mass of the printed density over [1, ∞): bracket/2 in closed form.
inline double distance_ratio_printed_mass(const NetworkParams& net) {
  return distance_ratio_pdf_p3_printed(1.0, net) * net.channel.alpha / 2.0;
}

/// 1 - P(G·W ≤ γ) = 1 - ∫ f_W(w) F_G(γ/w) dw, integrated in ln w.
inline double coverage_dom_p3(double gamma, const NetworkParams& net, const DominantOptions& opt = {}) {
  net.validate();
  if (!(gamma >= 0.0)) throw DomainError("coverage_dom_p3: gamma must be >= 0");
  if (gamma == 0.0) return 1.0;
  DominantOptions inner = opt;
  inner.spec = opt.spec.tightened();
  // w = e^t, t ≥ 0.
  const double e = 2.0 / net.channel.alpha;
  auto f = [&](double t) { return e * std::exp(-e * t) * gain_fade_ratio_cdf_p3(gamma * std::exp(-t), net, inner); };
  const double v = numerics::integrate_1d(f, 0.0, detail::kLogSpan / e, opt.spec);
  return std::clamp(1.0 - v, 0.0, 1.0);
}

/// The printed pairing: distance-ratio law combined with itself.
inline double coverage_dom_p3_printed_pairing(double gamma, const NetworkParams& net,
                                              const DominantOptions& opt = {}) {
  if (gamma == 0.0) return 1.0;
  const double e = 2.0 / net.channel.alpha;
  auto f = [&](double t) { return e * std::exp(-e * t) * distance_ratio_cdf_p3(gamma * std::exp(-t), net); };
  const double brk[] = {std::log(gamma)};
  const double v = numerics::integrate_1d(f, 0.0, detail::kLogSpan / e, opt.spec, brk);
  return std::clamp(1.0 - v, 0.0, 1.0);
}

inline CoverageCurve dominant_curve(Policy policy, const std::vector<double>& thresholds_db, const NetworkParams& net,
                                    const DominantOptions& opt = {}) {
  if (policy == Policy::kMaxPower) throw DomainError("dominant_curve: defined for P2 and P3 only");
  CoverageCurve c{"dominant", std::string(policy_tag(policy)), {}};
  for (double gdb : thresholds_db) {
    const double g = db_to_linear(gdb);
    c.rows.push_back({gdb, policy == Policy::kMinAngle ? coverage_dom_p2(g, net, opt) : coverage_dom_p3(g, net, opt),
                      0.0, 0});
  }
  return c;
}

}  // namespace mmwcov
