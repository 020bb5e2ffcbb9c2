// SPDX-License-Identifier: Apache-2.0
#pragma once

// Laplace transforms written as L(s) = exp(F(s)). Derivatives of L follow
// from derivatives of the exponent through
//   L^(k) = sum_{j=0}^{k-1} C(k-1, j) F^(k-j) L^(j).

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mmwcov/error.hpp"
#include "mmwcov/numerics/special.hpp"

namespace mmwcov::numerics {

struct LaplaceEvaluator {
  /// exponent(s, k) returns F^(k)(s) for k = 0..max_order.
  std::function<double(double, int)> exponent;
  int max_order = 0;

  double operator()(double s) const { return std::exp(exponent(s, 0)); }
};

/// Returns (L(s), L'(s), ..., L^(k_max)(s)).
inline std::vector<double> laplace_derivatives(const LaplaceEvaluator& lt, double s, int k_max) {
  if (k_max < 0) throw DomainError("laplace_derivatives: k_max must be >= 0");
  if (k_max > lt.max_order)
    throw DomainError("laplace_derivatives: k_max " + std::to_string(k_max) + " exceeds available order " +
                      std::to_string(lt.max_order));
  if (!(s >= 0.0)) throw DomainError("laplace_derivatives: requires s >= 0");
  std::vector<double> exps(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) exps[k] = lt.exponent(s, k);
  std::vector<double> out(exps.size());
  out[0] = std::exp(exps[0]);
  for (int k = 1; k <= k_max; ++k) {
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += binomial(k - 1, j) * exps[k - j] * out[j];
    out[k] = acc;
  }
  return out;
}

/// P(h > s·I_tot) style sum used by every coverage theorem with integer
/// Nakagami shape m: sum_{k<m} (-s)^k / k! · L^(k)(s).
inline double gamma_ccdf_mixture(const LaplaceEvaluator& lt, double s, int m) {
  if (m < 1) throw DomainError("gamma_ccdf_mixture: shape must be >= 1");
  const auto d = laplace_derivatives(lt, s, m - 1);
  double acc = 0.0;
  double coeff = 1.0;  // (-s)^k / k!
  for (int k = 0; k < m; ++k) {
    acc += coeff * d[k];
    coeff *= -s / (k + 1);
  }
  return acc;
}

}  // namespace mmwcov::numerics
