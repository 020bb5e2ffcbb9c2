// SPDX-License-Identifier: Apache-2.0
#pragma once

// Serving-BS selection for the three policies and SINR assembly.

#include <cstddef>
#include <limits>

#include "mmwcov/geometry.hpp"
#include "mmwcov/params.hpp"
#include "mmwcov/radio.hpp"

namespace mmwcov {

struct AssociationOutcome {
  PolarPoint serving;
  std::size_t serving_index = 0;  ///< position in field.points
  int beam_index = 1;             ///< 1-based; 0 when no beam grid is used (P3)
  double beam_direction = 0.0;
  double serving_offset = 0.0;  ///< φ_r for P1, φ_c for P2, 0 for P3
  Policy policy = Policy::kMaxPower;
};

struct SinrSample {
  double signal = 0.0;
  double interference = 0.0;
  double noise = 0.0;
  double sinr = 0.0;
};

namespace detail {

inline void require_nonempty(const PointField& field, const char* who) {
  if (field.empty()) throw DomainError(std::string(who) + ": field is empty");
}

// Strict "better" given a primary key where larger wins, ties by (r, phi).
inline bool prefer(double key, const PolarPoint& p, double best_key, const PolarPoint& best) {
  if (key != best_key) return key > best_key;
  if (p.r != best.r) return p.r < best.r;
  return p.phi < best.phi;
}

}  // namespace detail

/// Maximum received power over every (BS, beam) pair, two-branch gain.
inline AssociationOutcome associate_p1(const PointField& field, const AntennaConfig& cfg, const ChannelParams& ch) {
  detail::require_nonempty(field, "associate_p1");
  const auto beams = beam_maxima_pmf(cfg);
  AssociationOutcome out;
  out.policy = Policy::kMaxPower;
  double best = -1.0;
  bool have = false;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const PolarPoint& x = field.points[i];
    const double pl = std::pow(x.r, -ch.alpha);
    for (std::size_t j = 0; j < beams.size(); ++j) {
      const double off = angular_distance(beams[j].direction, x.phi);
      const double v = gain_approx(off, cfg) * pl;
      if (!have || detail::prefer(v, x, best, out.serving)) {
        have = true;
        best = v;
        out.serving = x;
        out.serving_index = i;
        out.beam_index = static_cast<int>(j) + 1;
        out.beam_direction = beams[j].direction;
        out.serving_offset = off;
      }
    }
  }
  return out;
}

/// Minimum angular distance between any beam maxima and any BS.
inline AssociationOutcome associate_p2(const PointField& field, const AntennaConfig& cfg) {
  detail::require_nonempty(field, "associate_p2");
  const auto beams = beam_maxima_pmf(cfg);
  AssociationOutcome out;
  out.policy = Policy::kMinAngle;
  double best = 0.0;
  bool have = false;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const PolarPoint& x = field.points[i];
    for (std::size_t j = 0; j < beams.size(); ++j) {
      const double off = angular_distance(beams[j].direction, x.phi);
      if (!have || detail::prefer(-off, x, -best, out.serving)) {
        have = true;
        best = off;
        out.serving = x;
        out.serving_index = i;
        out.beam_index = static_cast<int>(j) + 1;
        out.beam_direction = beams[j].direction;
        out.serving_offset = off;
      }
    }
  }
  return out;
}

/// Nearest BS in Euclidean distance, receive beam steered exactly at it.
inline AssociationOutcome associate_p3(const PointField& field) {
  detail::require_nonempty(field, "associate_p3");
  AssociationOutcome out;
  out.policy = Policy::kNearest;
  out.beam_index = 0;
  std::size_t best = 0;
  for (std::size_t i = 1; i < field.size(); ++i) {
    const PolarPoint& x = field.points[i];
    const PolarPoint& b = field.points[best];
    if (x.r < b.r || (x.r == b.r && x.phi < b.phi)) best = i;
  }
  out.serving = field.points[best];
  out.serving_index = best;
  out.beam_direction = out.serving.phi;
  out.serving_offset = 0.0;
  return out;
}

inline AssociationOutcome associate(Policy policy, const PointField& field, const AntennaConfig& cfg,
                                    const ChannelParams& ch) {
  switch (policy) {
    case Policy::kMaxPower: return associate_p1(field, cfg, ch);
    case Policy::kMinAngle: return associate_p2(field, cfg);
    case Policy::kNearest: return associate_p3(field);
  }
  throw DomainError("associate: unknown policy");
}

/// Direction interferer offsets are measured from for the given outcome.
inline double interference_reference(const AssociationOutcome& out, InterferenceReference p2_ref) {
  switch (out.policy) {
    case Policy::kMaxPower: return out.beam_direction;
    case Policy::kMinAngle: return p2_ref == InterferenceReference::kLink ? out.serving.phi : out.beam_direction;
    case Policy::kNearest: return out.serving.phi;
  }
  return out.beam_direction;
}

/// Draws the serving fade first, then one fade per interferer in field order.
/// Signal uses the two-branch gain (g_max for P3); interference uses the 3GPP pattern.
template <class Rng>
SinrSample compute_sinr(const PointField& field, const AssociationOutcome& out, const AntennaConfig& cfg,
                        const ChannelParams& ch, Rng& rng,
                        InterferenceReference p2_ref = InterferenceReference::kLink) {
  const double k = ch.path_loss_constant();
  const double g_max = cfg.g_max();
  const double branch = out.policy == Policy::kNearest ? g_max : gain_approx(out.serving_offset, cfg);
  SinrSample s;
  const double h_s = sample_fading(ch.m_s, rng);
  s.signal = ch.p_tx * h_s * g_max * branch * k * std::pow(out.serving.r, -ch.alpha);
  const double ref = interference_reference(out, p2_ref);
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (i == out.serving_index) continue;
    const PolarPoint& x = field.points[i];
    const double h_x = sample_fading(ch.m_x, rng);
    s.interference += ch.p_tx * h_x * g_max * gain_3gpp(angular_distance(ref, x.phi), cfg) * k * std::pow(x.r, -ch.alpha);
  }
  s.noise = ch.noise;
  const double denom = s.interference + s.noise;
  s.sinr = denom > 0.0 ? s.signal / denom : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace mmwcov
