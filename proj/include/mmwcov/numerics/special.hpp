// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mmwcov/error.hpp"

namespace mmwcov::numerics {

inline double special_gamma(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("special_gamma: requires a > 0, got " + std::to_string(a));
  return boost::math::tgamma(a);
}

/// Upper incomplete gamma Γ(a, x) (not regularized).
inline double special_gamma_upper(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("special_gamma_upper: requires a > 0");
  if (!(x >= 0.0)) throw DomainError("special_gamma_upper: requires x >= 0");
  if (std::isinf(x)) return 0.0;
  return boost::math::tgamma(a, x);
}

/// Lower incomplete gamma γ(a, x) = Γ(a) - Γ(a, x), computed without cancellation.
inline double special_gamma_lower(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("special_gamma_lower: requires a > 0");
  if (!(x >= 0.0)) throw DomainError("special_gamma_lower: requires x >= 0");
  if (std::isinf(x)) return boost::math::tgamma(a);
  return boost::math::tgamma_lower(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a).
inline double special_gamma_q(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("special_gamma_q: requires a > 0");
  if (!(x >= 0.0)) throw DomainError("special_gamma_q: requires x >= 0");
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(a, x);
}

/// Regularized lower incomplete gamma P(a, x).
inline double special_gamma_p(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("special_gamma_p: requires a > 0");
  if (!(x >= 0.0)) throw DomainError("special_gamma_p: requires x >= 0");
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(a, x);
}

inline double special_erf(double x) {
  if (std::isnan(x)) throw DomainError("special_erf: NaN argument");
  return boost::math::erf(x);
}

/// Regularized incomplete beta I_x(a, b).
inline double special_ibeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("special_ibeta: requires a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("special_ibeta: requires x in [0,1]");
  return boost::math::ibeta(a, b, x);
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace mmwcov::numerics
