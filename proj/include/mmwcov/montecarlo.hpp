// SPDX-License-Identifier: Apache-2.0
#pragma once

// Trial engine. Each trial owns a generator derived from (master_seed,
// trial_index) and writes into its own slot, so results do not depend on
// how trials are spread over workers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mmwcov/association.hpp"
#include "mmwcov/curve.hpp"
#include "mmwcov/geometry.hpp"
#include "mmwcov/params.hpp"
#include "mmwcov/random.hpp"

namespace mmwcov {

struct SimPlan {
  NetworkParams params;
  Policy policy = Policy::kMaxPower;
  std::vector<double> thresholds_db{-10.0, -5.0, 0.0, 5.0, 10.0, 15.0};
  std::size_t n_trials = 200000;
  std::uint64_t master_seed = 1;
  unsigned workers = 1;  ///< 0 selects std::thread::hardware_concurrency()
  InterferenceReference p2_reference = InterferenceReference::kLink;

  void validate() const {
    params.validate();
    if (n_trials < 1) throw DomainError("SimPlan: n_trials must be >= 1");
    for (std::size_t i = 1; i < thresholds_db.size(); ++i)
      if (!(thresholds_db[i] > thresholds_db[i - 1]))
        throw DomainError("SimPlan: thresholds must be strictly increasing");
    for (double t : thresholds_db)
      if (std::isnan(t)) throw DomainError("SimPlan: NaN threshold");
  }
};

/// Runs body(i) for i in [0, n) over `workers` threads in contiguous blocks.
template <class Body>
void parallel_trials(std::size_t n, unsigned workers, Body&& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// One realization: field, association and SINR.
struct Realization {
  PointField field;
  AssociationOutcome outcome;
  SinrSample sinr;
};

template <class Rng>
Realization sample_realization(const SimPlan& plan, Rng& rng) {
  const auto& np = plan.params;
  Realization r;
  r.field = sample_ppp(np.density, np.channel.r_los, rng, true);
  r.outcome = associate(plan.policy, r.field, np.antenna, np.channel);
  r.sinr = compute_sinr(r.field, r.outcome, np.antenna, np.channel, rng, plan.p2_reference);
  return r;
}

/// Per-trial SINR values in trial order.
inline std::vector<double> simulate_sinr(const SimPlan& plan) {
  plan.validate();
  std::vector<double> out(plan.n_trials);
  parallel_trials(plan.n_trials, plan.workers, [&](std::size_t i) {
    auto rng = trial_rng(plan.master_seed, i);
    out[i] = sample_realization(plan, rng).sinr.sinr;
  });
  return out;
}

inline CurveRow proportion_row(double x, std::size_t hits, std::size_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {x, p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

/// Empirical coverage P(SINR > γ) on plan.thresholds_db.
inline CoverageCurve run_coverage(const SimPlan& plan) {
  const auto sinr = simulate_sinr(plan);
  CoverageCurve c{"mc", std::string(policy_tag(plan.policy)), {}};
  for (double gdb : plan.thresholds_db) {
    const double g = db_to_linear(gdb);
    std::size_t hits = 0;
    for (double v : sinr) hits += v > g ? 1 : 0;
    c.rows.push_back(proportion_row(gdb, hits, sinr.size()));
  }
  return c;
}

/// Normalized received power: max g·r^-α over (BS, beam) for P1, g_max·r₁^-α for P3.
inline double normalized_received_power(const PointField& field, Policy policy, const AntennaConfig& cfg,
                                        const ChannelParams& ch) {
  if (policy == Policy::kNearest) {
    const auto o = associate_p3(field);
    return cfg.g_max() * std::pow(o.serving.r, -ch.alpha);
  }
  if (policy == Policy::kMaxPower) {
    const auto o = associate_p1(field, cfg, ch);
    return gain_approx(o.serving_offset, cfg) * std::pow(o.serving.r, -ch.alpha);
  }
  const auto o = associate_p2(field, cfg);
  return gain_approx(o.serving_offset, cfg) * std::pow(o.serving.r, -ch.alpha);
}

/// Empirical ccdf of the normalized received power at `levels`.
inline CoverageCurve run_power_ccdf(const SimPlan& plan, Policy policy, const std::vector<double>& levels) {
  plan.validate();
  std::vector<double> s(plan.n_trials);
  const auto& np = plan.params;
  parallel_trials(plan.n_trials, plan.workers, [&](std::size_t i) {
    auto rng = trial_rng(plan.master_seed, i);
    const auto field = sample_ppp(np.density, np.channel.r_los, rng, true);
    s[i] = normalized_received_power(field, policy, np.antenna, np.channel);
  });
  CoverageCurve c{"mc", std::string(policy_tag(policy)), {}};
  for (double lv : levels) {
    std::size_t hits = 0;
    for (double v : s) hits += v > lv ? 1 : 0;
    c.rows.push_back(proportion_row(lv, hits, s.size()));
  }
  return c;
}

enum class Statistic {
  kPhiC,             ///< P2 serving offset φ_c
  kServingPower,     ///< P1 maximum normalized power S
  kGainRatioP2,      ///< g(|φ₁|)/g(|φ₂|), both absolute angles < φ_A
  kFadeRatioP2,      ///< h₁d₁^-α / (h₂d₂^-α) on the same conditioned fields
  kGainFadeRatioP3,  ///< g_max·h₁ / (g(|φ₂|)·h₂), relative angle < φ_A
  kDistanceRatioP3,  ///< (r₂/r₁)^α for the two nearest BSs
  kAngles12,         ///< (|φ₁|, |φ₂|): two smallest absolute angles from 0
  kDistances12,      ///< (r₁, r₂): two smallest radii
  kDominantSirP2,    ///< G·W for P2 with the kGainRatioP2 conditioning
  kDominantSirP3,    ///< G·W for P3 with the kGainFadeRatioP3 conditioning
  kInterfererGainP3, ///< g(|φ₂|) for P3 with the kGainFadeRatioP3 conditioning
};

inline std::string_view statistic_name(Statistic s) {
  switch (s) {
    case Statistic::kPhiC: return "phi_c";
    case Statistic::kServingPower: return "S";
    case Statistic::kGainRatioP2: return "G_ratio_p2";
    case Statistic::kFadeRatioP2: return "W_ratio_p2";
    case Statistic::kGainFadeRatioP3: return "G_p3";
    case Statistic::kDistanceRatioP3: return "W_p3";
    case Statistic::kAngles12: return "varphi12";
    case Statistic::kDistances12: return "r12";
    case Statistic::kDominantSirP2: return "sir_dom_p2";
    case Statistic::kDominantSirP3: return "sir_dom_p3";
    case Statistic::kInterfererGainP3: return "g2_p3";
  }
  return "?";
}

inline bool statistic_is_pair(Statistic s) { return s == Statistic::kAngles12 || s == Statistic::kDistances12; }

struct StatisticSamples {
  std::vector<double> x;
  std::vector<double> y;  ///< empty for scalar statistics
  std::size_t n_fields = 0;
  std::size_t n_accepted = 0;
  std::string conditioning;

  double acceptance_rate() const { return n_fields ? static_cast<double>(n_accepted) / n_fields : 0.0; }
};

namespace detail {

// Two smallest absolute angles from direction 0 as (angle, index) pairs.
inline std::pair<std::pair<double, std::size_t>, std::pair<double, std::size_t>> two_smallest_abs_angles(
    const PointField& f) {
  std::pair<double, std::size_t> a{std::numeric_limits<double>::infinity(), 0}, b = a;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = angular_distance(f.points[i].phi, 0.0);
    if (v < a.first) {
      b = a;
      a = {v, i};
    } else if (v < b.first) {
      b = {v, i};
    }
  }
  return {a, b};
}

inline std::string conditioning_text(Statistic s) {
  switch (s) {
    case Statistic::kPhiC:
    case Statistic::kServingPower: return "N>=1";
    case Statistic::kGainRatioP2:
    case Statistic::kFadeRatioP2:
    case Statistic::kDominantSirP2: return "|phi1|<phi_A and |phi2|<phi_A";
    case Statistic::kGainFadeRatioP3:
    case Statistic::kDominantSirP3:
    case Statistic::kInterfererGainP3: return "N>=2 and |phi2|<phi_A";
    default: return "N>=2";
  }
}

}  // namespace detail

/// Draws one value (or pair) per accepted field.
inline StatisticSamples sample_statistic(const SimPlan& plan, Statistic stat) {
  plan.validate();
  const auto& np = plan.params;
  const auto& cfg = np.antenna;
  const auto& ch = np.channel;
  const double phi_a = cfg.phi_a();
  const double alpha = ch.alpha;
  std::vector<std::optional<std::pair<double, double>>> slot(plan.n_trials);
  const bool nonempty = stat == Statistic::kPhiC || stat == Statistic::kServingPower;
  parallel_trials(plan.n_trials, plan.workers, [&](std::size_t i) {
    auto rng = trial_rng(plan.master_seed, i);
    const auto f = sample_ppp(np.density, ch.r_los, rng, nonempty);
    switch (stat) {
      case Statistic::kPhiC:
        slot[i] = std::pair{associate_p2(f, cfg).serving_offset, 0.0};
        return;
      case Statistic::kServingPower:
        slot[i] = std::pair{normalized_received_power(f, Policy::kMaxPower, cfg, ch), 0.0};
        return;
      case Statistic::kGainRatioP2:
      case Statistic::kFadeRatioP2:
      case Statistic::kDominantSirP2: {
        if (f.size() < 2) return;
        const auto [a, b] = detail::two_smallest_abs_angles(f);
        if (!(a.first < phi_a && b.first < phi_a)) return;
        const double g = gain_approx(a.first, cfg) / gain_approx(b.first, cfg);
        if (stat == Statistic::kGainRatioP2) {
          slot[i] = std::pair{g, 0.0};
          return;
        }
        const double h1 = sample_fading(ch.m_s, rng);
        const double h2 = sample_fading(ch.m_x, rng);
        const double w = h1 * std::pow(f.points[a.second].r, -alpha) / (h2 * std::pow(f.points[b.second].r, -alpha));
        slot[i] = std::pair{stat == Statistic::kFadeRatioP2 ? w : g * w, 0.0};
        return;
      }
      case Statistic::kGainFadeRatioP3:
      case Statistic::kDominantSirP3:
      case Statistic::kInterfererGainP3: {
        if (f.size() < 2) return;
        const auto [i1, i2] = two_nearest_by_distance(f);
        const double rel = angular_distance(f.points[i1].phi, f.points[i2].phi);
        if (!(rel < phi_a)) return;
        if (stat == Statistic::kInterfererGainP3) {
          slot[i] = std::pair{gain_approx(rel, cfg), 0.0};
          return;
        }
        const double h1 = sample_fading(ch.m_s, rng);
        const double h2 = sample_fading(ch.m_x, rng);
        const double g = cfg.g_max() * h1 / (gain_approx(rel, cfg) * h2);
        const double w = std::pow(f.points[i2].r / f.points[i1].r, alpha);
        slot[i] = std::pair{stat == Statistic::kGainFadeRatioP3 ? g : g * w, 0.0};
        return;
      }
      case Statistic::kDistanceRatioP3: {
        if (f.size() < 2) return;
        const auto [i1, i2] = two_nearest_by_distance(f);
        slot[i] = std::pair{std::pow(f.points[i2].r / f.points[i1].r, alpha), 0.0};
        return;
      }
      case Statistic::kAngles12: {
        if (f.size() < 2) return;
        const auto [a, b] = detail::two_smallest_abs_angles(f);
        slot[i] = std::pair{a.first, b.first};
        return;
      }
      case Statistic::kDistances12: {
        if (f.size() < 2) return;
        const auto [i1, i2] = two_nearest_by_distance(f);
        slot[i] = std::pair{f.points[i1].r, f.points[i2].r};
        return;
      }
    }
  });
  StatisticSamples out;
  out.n_fields = plan.n_trials;
  out.conditioning = detail::conditioning_text(stat);
  const bool pair = statistic_is_pair(stat);
  for (const auto& s : slot) {
    if (!s) continue;
    out.x.push_back(s->first);
    if (pair) out.y.push_back(s->second);
  }
  out.n_accepted = out.x.size();
  return out;
}

/// Coverage of the dominant-interferer SIR on the conditioned fields (P2, P3).
inline CoverageCurve run_dominant_coverage(const SimPlan& plan) {
  if (plan.policy == Policy::kMaxPower) throw DomainError("run_dominant_coverage: defined for P2 and P3 only");
  const auto s =
      sample_statistic(plan, plan.policy == Policy::kMinAngle ? Statistic::kDominantSirP2 : Statistic::kDominantSirP3);
  if (s.x.empty()) throw DomainError("run_dominant_coverage: no field met the conditioning");
  CoverageCurve c{"mc", std::string(policy_tag(plan.policy)), {}};
  for (double gdb : plan.thresholds_db) {
    const double g = db_to_linear(gdb);
    const auto hits = static_cast<std::size_t>(std::count_if(s.x.begin(), s.x.end(), [g](double v) { return v > g; }));
    c.rows.push_back(proportion_row(gdb, hits, s.x.size()));
  }
  return c;
}

/// n-th smallest angle of the field (counter-clockwise from 0, or absolute
/// when `absolute`), one entry per field; +∞ when fewer than n points exist.
inline std::vector<double> sample_angular_order(const SimPlan& plan, int n, bool absolute) {
  plan.validate();
  if (n < 1) throw DomainError("sample_angular_order: n must be >= 1");
  const auto& np = plan.params;
  std::vector<double> out(plan.n_trials);
  parallel_trials(plan.n_trials, plan.workers, [&](std::size_t i) {
    auto rng = trial_rng(plan.master_seed, i);
    const auto f = sample_ppp(np.density, np.channel.r_los, rng, false);
    if (f.size() < static_cast<std::size_t>(n)) {
      out[i] = std::numeric_limits<double>::infinity();
      return;
    }
    std::vector<double> a;
    a.reserve(f.size());
    for (const auto& p : f.points) a.push_back(absolute ? angular_distance(p.phi, 0.0) : p.phi);
    std::nth_element(a.begin(), a.begin() + (n - 1), a.end());
    out[i] = a[static_cast<std::size_t>(n - 1)];
  });
  return out;
}

struct Histogram {
  std::vector<double> edges_x;
  std::vector<double> edges_y;  ///< empty for scalar statistics
  std::vector<double> density;  ///< row-major over (x bin, y bin)
  std::size_t n_in_range = 0;
  double acceptance_rate = 1.0;
  std::string conditioning;
};

struct BinSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t bins = 50;
  bool log_spacing = false;

  std::vector<double> edges() const {
    if (bins < 1 || !(hi > lo) || (log_spacing && !(lo > 0.0))) throw DomainError("BinSpec: invalid bin layout");
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
      const double t = static_cast<double>(i) / bins;
      e[i] = log_spacing ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    return e;
  }
};

/// Normalized histogram of a statistic; density integrates to 1 over the bins.
/// Throws when the conditioning event is accepted in fewer than 1e-4 of fields.
inline Histogram run_histogram(const SimPlan& plan, Statistic stat, const BinSpec& xbins,
                               std::optional<BinSpec> ybins = std::nullopt) {
  const auto s = sample_statistic(plan, stat);
  if (s.acceptance_rate() < 1e-4)
    throw DomainError("run_histogram: conditioning '" + s.conditioning + "' accepted in " +
                      std::to_string(s.acceptance_rate()) +
                      " of fields; raise the density or the LOS radius, or widen the antenna mainlobe");
  Histogram h;
  h.edges_x = xbins.edges();
  h.acceptance_rate = s.acceptance_rate();
  h.conditioning = s.conditioning;
  const bool pair = statistic_is_pair(stat);
  if (pair) h.edges_y = (ybins ? *ybins : xbins).edges();
  const std::size_t nx = h.edges_x.size() - 1;
  const std::size_t ny = pair ? h.edges_y.size() - 1 : 1;
  std::vector<std::size_t> counts(nx * ny, 0);
  auto locate = [](const std::vector<double>& e, double v) -> std::optional<std::size_t> {
    if (!(v >= e.front()) || !(v <= e.back())) return std::nullopt;
    auto it = std::upper_bound(e.begin(), e.end(), v);
    std::size_t k = static_cast<std::size_t>(it - e.begin());
    return k == 0 ? 0 : std::min(k - 1, e.size() - 2);
  };
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const auto bx = locate(h.edges_x, s.x[i]);
    if (!bx) continue;
    std::size_t by = 0;
    if (pair) {
      const auto b = locate(h.edges_y, s.y[i]);
      if (!b) continue;
      by = *b;
    }
    ++counts[*bx * ny + by];
    ++h.n_in_range;
  }
  h.density.assign(counts.size(), 0.0);
  if (h.n_in_range == 0) return h;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double wx = h.edges_x[ix + 1] - h.edges_x[ix];
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double wy = pair ? h.edges_y[iy + 1] - h.edges_y[iy] : 1.0;
      h.density[ix * ny + iy] = static_cast<double>(counts[ix * ny + iy]) / (h.n_in_range * wx * wy);
    }
  }
  return h;
}

}  // namespace mmwcov
