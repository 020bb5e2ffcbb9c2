// SPDX-License-Identifier: Apache-2.0
#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature with interval bisection,
// semi-infinite range mapping and nested 2D integration.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "mmwcov/error.hpp"

namespace mmwcov::numerics {

struct QuadratureSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-10;
  int max_subdivisions = 2000;
  /// Panels touching a mapped infinite endpoint whose contribution falls
  /// below this mass stop being refined.
  double infinite_tail_cutoff_mass = 1e-9;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(infinite_tail_cutoff_mass > 0.0))
      throw DomainError("QuadratureSpec: tolerances must be strictly positive");
    if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
  }

  /// Tolerances for an inner integral nested inside an outer one.
  QuadratureSpec tightened(double factor = 1e-2) const {
    QuadratureSpec s = *this;
    s.rel_tol = std::max(rel_tol * factor, 1e-14);
    s.abs_tol = std::max(abs_tol * factor, 1e-300);
    return s;
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  bool converged = true;
};

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double dx = half * kXgk[jtw];
    const double y1 = f(center - dx);
    const double y2 = f(center + dx);
    f1[jtw] = y1;
    f2[jtw] = y2;
    resg += kWg[j] * (y1 + y2);
    resk += kWgk[jtw] * (y1 + y2);
    resabs += kWgk[jtw] * (std::abs(y1) + std::abs(y2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double dx = half * kXgk[jtwm1];
    const double y1 = f(center - dx);
    const double y2 = f(center + dx);
    f1[jtwm1] = y1;
    f2[jtwm1] = y2;
    resk += kWgk[jtwm1] * (y1 + y2);
    resabs += kWgk[jtwm1] * (std::abs(y1) + std::abs(y2));
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
  const double result = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(result)) err = std::numeric_limits<double>::infinity();
  return {a, b, result, err};
}

// Adaptive loop on a finite interval already split at `cuts` (sorted).
// With `tail_at_b`, small panels ending at the upper end are accepted as the
// cut-off tail of a mapped infinite range.
template <class F>
QuadratureResult adapt(F& f, const std::vector<double>& cuts, const QuadratureSpec& spec, bool tail_at_b) {
  std::priority_queue<Panel> heap;
  std::vector<Panel> done;
  double total = 0.0;
  double total_err = 0.0;
  const double b_end = cuts.back();
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    Panel p = gk15(f, cuts[i], cuts[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  int subdivisions = 0;
  auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (total_err > target() && !heap.empty() && subdivisions < spec.max_subdivisions) {
    Panel worst = heap.top();
    heap.pop();
    if (tail_at_b && worst.b == b_end && std::abs(worst.value) + worst.error < spec.infinite_tail_cutoff_mass) {
      total_err -= worst.error;
      worst.error = 0.0;
      done.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      done.push_back(worst);  // exhausted at machine resolution
      continue;
    }
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    ++subdivisions;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  // Re-sum in position order so the result does not depend on heap history.
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  double sum = 0.0, err = 0.0;
  for (const auto& p : done) {
    sum += p.value;
    err += p.error;
  }
  QuadratureResult r{sum, err, subdivisions, true};
  r.converged = std::isfinite(sum) && err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(sum));
  return r;
}

inline std::vector<double> make_cuts(double a, double b, std::span<const double> breaks) {
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace detail

/// Integrates f over [a,b]; b may be +infinity and a may be -infinity.
/// Breakpoints inside the range split the initial panels. Does not throw on
/// non-convergence; inspect `converged`.
template <class F>
QuadratureResult integrate_1d_result(F&& f, double a, double b, const QuadratureSpec& spec = {},
                                     std::span<const double> breaks = {}) {
  spec.validate();
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integrate_1d: NaN bound");
  if (a == b) return {};
  if (a > b) {
    auto r = integrate_1d_result(f, b, a, spec, breaks);
    r.value = -r.value;
    return r;
  }
  const bool inf_a = std::isinf(a);
  const bool inf_b = std::isinf(b);
  if (!inf_a && !inf_b) {
    auto fn = [&f](double x) { return static_cast<double>(f(x)); };
    return detail::adapt(fn, detail::make_cuts(a, b, breaks), spec, false);
  }
  if (inf_a && inf_b) {
    // Split at 0 (or the first breakpoint) and map both halves.
    const double pivot = breaks.empty() ? 0.0 : breaks.front();
    auto lo = integrate_1d_result(f, a, pivot, spec, {});
    auto hi = integrate_1d_result(f, pivot, b, spec, breaks.subspan(breaks.empty() ? 0 : 1));
    return {lo.value + hi.value, lo.error + hi.error, lo.subdivisions + hi.subdivisions,
            lo.converged && hi.converged};
  }
  // x = a + t/(1-t) on [0,1), or x = b - t/(1-t) for (-inf, b].
  const double origin = inf_b ? a : b;
  const double sign = inf_b ? 1.0 : -1.0;
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    const double x = origin + sign * t / one_minus;
    const double v = static_cast<double>(f(x));
    return v / (one_minus * one_minus);
  };
  std::vector<double> tbreaks;
  for (double x : breaks) {
    const double u = sign * (x - origin);
    if (u > 0.0 && std::isfinite(u)) tbreaks.push_back(u / (1.0 + u));
  }
  return detail::adapt(mapped, detail::make_cuts(0.0, 1.0, tbreaks), spec, true);
}

/// Integrates f over [a,b] (either bound may be infinite). Throws
/// QuadratureError carrying the best estimate when the tolerance is not met
/// within spec.max_subdivisions bisections.
template <class F>
double integrate_1d(F&& f, double a, double b, const QuadratureSpec& spec = {},
                    std::span<const double> breaks = {}) {
  const auto r = integrate_1d_result(f, a, b, spec, breaks);
  if (!r.converged) throw QuadratureError("integrate_1d did not converge", r.value, r.error);
  return r.value;
}

/// Nested integral of f(x, y) over x in [x0, x1], y in [y_lo(x), y_hi(x)].
/// The inner integral runs at tolerances tightened by 1e-2 so the outer
/// integrand is smooth at the outer tolerance.
template <class F, class Lo, class Hi>
double integrate_2d(F&& f, double x0, double x1, Lo&& y_lo, Hi&& y_hi, const QuadratureSpec& spec = {},
                    std::span<const double> x_breaks = {}) {
  const QuadratureSpec inner = spec.tightened();
  auto outer = [&](double x) {
    const double lo = y_lo(x);
    const double hi = y_hi(x);
    if (!(hi > lo)) return 0.0;
    auto fy = [&](double y) { return static_cast<double>(f(x, y)); };
    return integrate_1d(fy, lo, hi, inner);
  };
  return integrate_1d(outer, x0, x1, spec, x_breaks);
}

/// Rectangle overload.
template <class F>
double integrate_2d(F&& f, double x0, double x1, double y0, double y1, const QuadratureSpec& spec = {},
                    std::span<const double> x_breaks = {}) {
  return integrate_2d(
      std::forward<F>(f), x0, x1, [y0](double) { return y0; }, [y1](double) { return y1; }, spec, x_breaks);
}

}  // namespace mmwcov::numerics
