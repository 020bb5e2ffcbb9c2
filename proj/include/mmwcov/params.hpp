// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

#include "mmwcov/error.hpp"
#include "mmwcov/radio.hpp"

namespace mmwcov {

enum class Policy { kMaxPower = 1, kMinAngle = 2, kNearest = 3 };

inline std::string_view policy_tag(Policy p) {
  switch (p) {
    case Policy::kMaxPower: return "P1";
    case Policy::kMinAngle: return "P2";
    case Policy::kNearest: return "P3";
  }
  return "?";
}

/// Direction from which P2 interferer offsets are measured.
enum class InterferenceReference {
  kLink,  ///< azimuth of the serving BS
  kBeam,  ///< maxima of the chosen receive beam
};

struct NetworkParams {
  AntennaConfig antenna;
  ChannelParams channel;
  double density = 0.0008;  ///< BS per m²

  /// Mean BS count λπR_L² in the LOS ball.
  double mean_count() const { return density * std::numbers::pi * channel.r_los * channel.r_los; }
  /// Probability that the LOS ball holds no BS.
  double void_probability() const { return std::exp(-mean_count()); }

  void validate() const {
    antenna.validate();
    channel.validate();
    if (!(density > 0.0) || !std::isfinite(density)) throw DomainError("NetworkParams: density must be > 0");
  }
};

}  // namespace mmwcov
