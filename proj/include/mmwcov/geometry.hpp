// SPDX-License-Identifier: Apache-2.0
#pragma once

// Finite PPP in the LOS ball and the angular / Euclidean order-statistic laws.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mmwcov/error.hpp"
#include "mmwcov/numerics/special.hpp"
#include "mmwcov/radio.hpp"

namespace mmwcov {

struct PolarPoint {
  double r = 0.0;    ///< meters
  double phi = 0.0;  ///< radians, [0, 2π)
  bool operator==(const PolarPoint&) const = default;
};

struct PointField {
  std::vector<PolarPoint> points;
  double ball_radius = 0.0;
  double density = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Homogeneous PPP of intensity `density` restricted to the ball of radius
/// `ball_radius`. With `require_nonempty`, empty draws are resampled.
template <class Rng>
PointField sample_ppp(double density, double ball_radius, Rng& rng, bool require_nonempty = true) {
  if (!(density > 0.0)) throw DomainError("sample_ppp: density must be > 0");
  if (!(ball_radius > 0.0)) throw DomainError("sample_ppp: ball radius must be > 0");
  PointField field{{}, ball_radius, density};
  std::poisson_distribution<long> count_dist(density * std::numbers::pi * ball_radius * ball_radius);
  long n = count_dist(rng);
  if (require_nonempty) {
    int rejections = 0;
    while (n == 0) {
      if (++rejections >= 1000000)
        throw DomainError("sample_ppp: 10^6 consecutive empty draws; density too low for the ball");
      n = count_dist(rng);
    }
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  field.points.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double r = ball_radius * std::sqrt(unit(rng));
    const double phi = kTwoPi * unit(rng);
    field.points.push_back({r, phi});
  }
  return field;
}

/// Density of the n-th nearest point in angle φ ∈ [0, 2π] (counter-clockwise
/// from the reference line) among points closer than r. Not renormalized:
/// the mass Γ(n, λπr²)/Γ(n) of "fewer than n points" is left out.
inline double angular_pdf_nth(int n, double phi, double r, double density) {
  if (n < 1) throw DomainError("angular_pdf_nth: n must be >= 1");
  if (!(r > 0.0) || !(density > 0.0)) throw DomainError("angular_pdf_nth: r and density must be > 0");
  if (phi < 0.0 || phi > kTwoPi) return 0.0;
  const double c = density * r * r / 2.0;
  if (phi == 0.0) return n == 1 ? c : 0.0;
  return std::exp(n * std::log(c * phi) - std::lgamma(n) - std::log(phi) - c * phi);
}

inline double angular_ccdf_nth(int n, double phi, double r, double density) {
  if (n < 1) throw DomainError("angular_ccdf_nth: n must be >= 1");
  if (!(r > 0.0) || !(density > 0.0)) throw DomainError("angular_ccdf_nth: r and density must be > 0");
  if (phi <= 0.0) return 1.0;
  return numerics::special_gamma_q(n, density * phi * r * r / 2.0);
}

/// Density of the n-th nearest absolute angular distance |φ| ∈ [0, π].
inline double abs_angular_pdf_nth(int n, double abs_phi, double r, double density) {
  if (n < 1) throw DomainError("abs_angular_pdf_nth: n must be >= 1");
  if (!(r > 0.0) || !(density > 0.0)) throw DomainError("abs_angular_pdf_nth: r and density must be > 0");
  if (abs_phi < 0.0 || abs_phi > std::numbers::pi) return 0.0;
  const double c = density * r * r;
  if (abs_phi == 0.0) return n == 1 ? c : 0.0;
  return std::exp(n * std::log(c * abs_phi) - std::lgamma(n) - std::log(abs_phi) - c * abs_phi);
}

inline double abs_angular_ccdf_nth(int n, double abs_phi, double r, double density) {
  if (abs_phi <= 0.0) return 1.0;
  return numerics::special_gamma_q(n, density * abs_phi * r * r);
}

/// Joint density of the two smallest absolute angular distances.
inline double joint_abs_angular_pdf(double abs_phi1, double abs_phi2, double r, double density) {
  if (!(r > 0.0) || !(density > 0.0)) throw DomainError("joint_abs_angular_pdf: r and density must be > 0");
  if (abs_phi1 < 0.0 || abs_phi2 < abs_phi1 || abs_phi2 > std::numbers::pi) return 0.0;
  const double c = density * r * r;
  return c * c * std::exp(-c * abs_phi2);
}

/// Closed-form joint cdf P(|φ1| ≤ a1, |φ2| ≤ a2) of the two smallest absolute angles.
inline double joint_abs_angular_cdf(double a1, double a2, double r, double density) {
  if (a1 <= 0.0 || a2 <= 0.0) return 0.0;
  a2 = std::min(a2, std::numbers::pi);
  a1 = std::min(a1, a2);
  const double c = density * r * r;
  return 1.0 - std::exp(-c * a1) - c * a1 * std::exp(-c * a2);
}

/// Joint density of the two smallest distances of a PPP, 0 ≤ r1 ≤ r2 ≤ r_max.
inline double joint_distance_pdf(double r1, double r2, double density,
                                 double r_max = std::numeric_limits<double>::infinity()) {
  if (!(density > 0.0)) throw DomainError("joint_distance_pdf: density must be > 0");
  if (r1 < 0.0 || r2 < r1 || r2 > r_max) return 0.0;
  const double pl = std::numbers::pi * density;
  return 4.0 * pl * pl * r1 * r2 * std::exp(-pl * r2 * r2);
}

/// k-th (1-based) point of the field in increasing wrapped angular distance
/// from `reference`. Ties break by radius, then azimuth.
inline PolarPoint nearest_in_angle(const PointField& field, double reference, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > field.size())
    throw DomainError("nearest_in_angle: field has fewer than k points");
  std::vector<PolarPoint> pts = field.points;
  auto key = [reference](const PolarPoint& p) { return angular_distance(p.phi, reference); };
  std::nth_element(pts.begin(), pts.begin() + (k - 1), pts.end(), [&](const PolarPoint& a, const PolarPoint& b) {
    const double ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    if (a.r != b.r) return a.r < b.r;
    return a.phi < b.phi;
  });
  return pts[static_cast<std::size_t>(k - 1)];
}

/// Indices of the two nearest points by distance (field must hold >= 2 points).
inline std::pair<std::size_t, std::size_t> two_nearest_by_distance(const PointField& field) {
  if (field.size() < 2) throw DomainError("two_nearest_by_distance: need at least two points");
  std::size_t a = 0, b = 1;
  if (field.points[b].r < field.points[a].r) std::swap(a, b);
  for (std::size_t i = 2; i < field.size(); ++i) {
    const double r = field.points[i].r;
    if (r < field.points[a].r) {
      b = a;
      a = i;
    } else if (r < field.points[b].r) {
      b = i;
    }
  }
  return {a, b};
}

}  // namespace mmwcov
