// SPDX-License-Identifier: Apache-2.0
#pragma once

// Kolmogorov-Smirnov distances between samples and analytic laws, and a
// tabulated cdf built by integrating a pdf panel by panel.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "mmwcov/error.hpp"
#include "mmwcov/numerics/quadrature.hpp"

namespace mmwcov {

/// Cumulative integral of a pdf on a fixed knot grid, linearly interpolated.
class CdfTable {
 public:
  CdfTable() = default;

  template <class Pdf>
  static CdfTable from_pdf(Pdf&& pdf, std::vector<double> knots, const numerics::QuadratureSpec& spec = {},
                           double start_mass = 0.0, std::span<const double> breaks = {}) {
    if (knots.size() < 2) throw DomainError("CdfTable: need at least two knots");
    std::sort(knots.begin(), knots.end());
    CdfTable t;
    t.knots_ = std::move(knots);
    t.values_.assign(t.knots_.size(), start_mass);
    numerics::QuadratureSpec ps = spec;
    ps.abs_tol = std::max(1e-300, spec.abs_tol / static_cast<double>(t.knots_.size()));
    for (std::size_t i = 1; i < t.knots_.size(); ++i) {
      const double a = t.knots_[i - 1], b = t.knots_[i];
      std::vector<double> local;
      for (double x : breaks)
        if (x > a && x < b) local.push_back(x);
      t.values_[i] = t.values_[i - 1] + numerics::integrate_1d(pdf, a, b, ps, local);
    }
    return t;
  }

  double operator()(double x) const {
    if (knots_.empty()) return 0.0;
    if (x <= knots_.front()) return values_.front();
    if (x >= knots_.back()) return values_.back();
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - knots_.begin());
    const double x0 = knots_[k - 1], x1 = knots_[k];
    const double w = (x - x0) / (x1 - x0);
    return values_[k - 1] + w * (values_[k] - values_[k - 1]);
  }

  double total() const { return values_.empty() ? 0.0 : values_.back(); }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

inline std::vector<double> linear_knots(double lo, double hi, std::size_t n) {
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return k;
}

inline std::vector<double> log_knots(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0)) throw DomainError("log_knots: lower end must be > 0");
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return k;
}

/// sup |F_emp - F| over the samples. The empirical cdf counts each sample
/// as 1/total, so non-finite samples (or a total larger than the sample
/// count) represent mass the analytic law leaves out of its support.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                          double total = -1.0) {
  if (total < 0.0) total = static_cast<double>(samples.size());
  if (!(total > 0.0)) throw DomainError("ks_distance: empty sample");
  std::sort(samples.begin(), samples.end());
  double d = 0.0;
  std::size_t i = 0;
  const std::size_t n = samples.size();
  while (i < n && std::isfinite(samples[i])) {
    std::size_t j = i;
    while (j < n && samples[j] == samples[i]) ++j;
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / total));
    d = std::max(d, std::abs(f - static_cast<double>(j) / total));
    i = j;
  }
  return d;
}

/// Two-dimensional KS distance over a (grid x grid) set of sample-quantile
/// corners: sup |P_emp(X<=a, Y<=b) - F(a, b)|.
inline double ks_distance_2d(const std::vector<double>& x, const std::vector<double>& y,
                             const std::function<double(double, double)>& cdf, double total = -1.0,
                             std::size_t grid = 64) {
  if (x.size() != y.size() || x.empty()) throw DomainError("ks_distance_2d: mismatched or empty samples");
  if (total < 0.0) total = static_cast<double>(x.size());
  auto quantiles = [grid](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> q;
    for (std::size_t k = 1; k <= grid; ++k) {
      const std::size_t idx = std::min(v.size() - 1, (k * v.size()) / (grid + 1));
      q.push_back(v[idx]);
    }
    q.erase(std::unique(q.begin(), q.end()), q.end());
    return q;
  };
  const auto qx = quantiles(x);
  const auto qy = quantiles(y);
  // counts[i][j]: samples with x in cell i, y in cell j (cell = number of thresholds below).
  const std::size_t nx = qx.size() + 1, ny = qy.size() + 1;
  std::vector<double> counts(nx * ny, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const std::size_t i = static_cast<std::size_t>(std::lower_bound(qx.begin(), qx.end(), x[k]) - qx.begin());
    const std::size_t j = static_cast<std::size_t>(std::lower_bound(qy.begin(), qy.end(), y[k]) - qy.begin());
    counts[i * ny + j] += 1.0;
  }
  // Prefix sums: P(X <= qx[a], Y <= qy[b]) uses cells 0..a, 0..b.
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      double v = counts[i * ny + j];
      if (i) v += counts[(i - 1) * ny + j];
      if (j) v += counts[i * ny + j - 1];
      if (i && j) v -= counts[(i - 1) * ny + j - 1];
      counts[i * ny + j] = v;
    }
  double d = 0.0;
  for (std::size_t a = 0; a < qx.size(); ++a)
    for (std::size_t b = 0; b < qy.size(); ++b)
      d = std::max(d, std::abs(counts[a * ny + b] / total - cdf(qx[a], qy[b])));
  return d;
}

}  // namespace mmwcov
