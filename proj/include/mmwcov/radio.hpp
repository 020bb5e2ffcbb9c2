// SPDX-License-Identifier: Apache-2.0
#pragma once

// Receiver antenna patterns, beam grid, path loss and Nakagami fading.
// Everything is linear-domain; dB appears only in AntennaConfig inputs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mmwcov/error.hpp"

namespace mmwcov {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 2.998e8;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Maps any angle to [0, 2π).
inline double wrap_angle(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

/// Absolute angular separation min(|Δ|, 2π - |Δ|) in [0, π].
inline double angular_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return d > std::numbers::pi ? kTwoPi - d : d;
}

struct AntennaConfig {
  double g_max_db = 10.0;
  double sla_db = 30.0;
  int sector_exp = 2;                 ///< beam count is 2^sector_exp
  std::optional<double> phi_3db_rad;  ///< defaults to 2π / 2^sector_exp

  int beam_count() const { return 1 << sector_exp; }
  double phi_3db() const { return phi_3db_rad.value_or(kTwoPi / beam_count()); }
  double g_max() const { return db_to_linear(g_max_db); }
  double g_s() const { return db_to_linear(g_max_db - sla_db); }
  /// Gain at the half-power offset φ_3dB/2.
  double g_3db() const { return db_to_linear(g_max_db - 3.0); }
  /// Mainlobe edge of the two-branch pattern, clamped to π.
  double phi_a() const {
    const double v = 0.5 * phi_3db() * std::sqrt((10.0 / 3.0) * std::log10(g_max() / g_s()));
    return std::min(v, std::numbers::pi);
  }

  void validate() const {
    if (sector_exp < 0 || sector_exp > 20) throw DomainError("AntennaConfig: sector_exp must be in [0, 20]");
    if (!(sla_db > 0.0)) throw DomainError("AntennaConfig: sla_db must be > 0");
    if (!std::isfinite(g_max_db)) throw DomainError("AntennaConfig: g_max_db must be finite");
    if (phi_3db_rad && !(*phi_3db_rad > 0.0 && *phi_3db_rad <= kTwoPi))
      throw DomainError("AntennaConfig: phi_3db must be in (0, 2π]");
  }
};

struct ChannelParams {
  double alpha = 2.0;       ///< LOS path-loss exponent
  double f_c = 26.5e9;      ///< carrier, Hz
  int m_s = 2;              ///< serving-link Nakagami shape
  int m_x = 2;              ///< interferer Nakagami shape
  double r_los = 75.0;      ///< LOS ball radius, m
  double p_tx = dbm_to_watts(45.0);
  double noise = dbm_to_watts(-74.0);

  double path_loss_constant() const {
    const double v = kSpeedOfLight / (4.0 * std::numbers::pi * f_c);
    return v * v;
  }
  /// True when alpha lies in the [1.8, 2.5] range typical of LOS links.
  bool alpha_in_typical_range() const { return alpha >= 1.8 && alpha <= 2.5; }

  void validate() const {
    if (!(alpha > 0.0)) throw DomainError("ChannelParams: alpha must be > 0");
    if (!(f_c > 0.0)) throw DomainError("ChannelParams: f_c must be > 0");
    if (m_s < 1 || m_x < 1) throw DomainError("ChannelParams: fading shapes must be integers >= 1");
    if (!(r_los > 0.0)) throw DomainError("ChannelParams: r_los must be > 0");
    if (!(p_tx > 0.0)) throw DomainError("ChannelParams: p_tx must be > 0");
    if (!(noise >= 0.0)) throw DomainError("ChannelParams: noise must be >= 0");
  }
};

/// Exact 3GPP pattern, linear. `offset` is any angle; it is wrapped to [0, π].
inline double gain_3gpp(double offset, const AntennaConfig& cfg) {
  const double d = angular_distance(offset, 0.0);
  const double x = d / cfg.phi_3db();
  const double att = std::min(12.0 * x * x, cfg.sla_db);
  return db_to_linear(cfg.g_max_db - att);
}

/// Two-branch approximation: Gaussian-type mainlobe up to φ_A, flat g_s beyond.
inline double gain_approx(double offset, const AntennaConfig& cfg) {
  const double d = angular_distance(offset, 0.0);
  if (d > cfg.phi_a()) return cfg.g_s();
  const double x = 2.0 * d / cfg.phi_3db();
  return cfg.g_max() * std::pow(10.0, -0.3 * x * x);
}

/// Inverse of the mainlobe branch: offset in [0, φ_A] giving gain g.
inline double mainlobe_offset_for_gain(double g, const AntennaConfig& cfg) {
  const double l = std::log10(cfg.g_max() / g);
  return 0.5 * cfg.phi_3db() * std::sqrt(std::max(0.0, (10.0 / 3.0) * l));
}

struct BeamDirection {
  double direction;
  double probability;
};

/// Beam maxima π/2^m + (j-1)·π/2^(m-1), j = 1..2^m, equiprobable.
inline std::vector<BeamDirection> beam_maxima_pmf(const AntennaConfig& cfg) {
  const int n = cfg.beam_count();
  const double first = std::numbers::pi / n;
  const double step = kTwoPi / n;
  std::vector<BeamDirection> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out.push_back({first + j * step, 1.0 / n});
  return out;
}

/// Offset from `phi` to the nearest beam maxima, in [0, π/2^m].
inline double nearest_beam_offset(double phi, const AntennaConfig& cfg) {
  const int n = cfg.beam_count();
  const double step = kTwoPi / n;
  const double first = std::numbers::pi / n;
  const double u = wrap_angle(phi - first) / step;
  const double frac = u - std::floor(u);
  return std::min(frac, 1.0 - frac) * step;
}

inline double path_loss(double r, const ChannelParams& ch) {
  if (!(r > 0.0)) throw DomainError("path_loss: requires r > 0");
  return ch.path_loss_constant() * std::pow(r, -ch.alpha);
}

/// Unit-mean Gamma(m, 1/m) power gain.
template <class Rng>
double sample_fading(int m, Rng& rng) {
  if (m < 1) throw DomainError("sample_fading: shape must be >= 1");
  std::gamma_distribution<double> dist(static_cast<double>(m), 1.0 / m);
  return dist(rng);
}

/// Nakagami power pdf m^m w^(m-1) e^(-m w) / Γ(m).
inline double fading_pdf(double w, int m) {
  if (w < 0.0) return 0.0;
  if (w == 0.0) return m == 1 ? 1.0 : 0.0;
  return std::exp(m * std::log(static_cast<double>(m)) + (m - 1) * std::log(w) - m * w - std::lgamma(m));
}

/// Density of the mainlobe gain g(φ_r) for φ_r ~ U[0, φ_3dB/2], supported on [g_3dB, g_max].
inline double gain_pdf_mainlobe(double x, const AntennaConfig& cfg) {
  if (!(x >= cfg.g_3db()) || !(x <= cfg.g_max())) return 0.0;
  const double depth_db = cfg.g_max_db - 10.0 * std::log10(x);
  if (depth_db <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 / (std::log(10.0) * x * 12.0 * std::sqrt(depth_db / 12.0));
}

}  // namespace mmwcov
