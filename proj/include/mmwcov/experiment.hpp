// SPDX-License-Identifier: Apache-2.0
#pragma once

// Experiment configuration and orchestration: parses flat `key = value`
// text, applies MMWCOV_* environment overrides, runs the built-in figure
// scenarios and writes CSVs plus a JSON manifest.
//
// Needs nlohmann/json (vendor/json.hpp) on the include path; the umbrella
// header does not pull this file in.

#include <algorithm>
#include <boost/version.hpp>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mmwcov/analytic.hpp"
#include "mmwcov/dominant.hpp"
#include "mmwcov/error.hpp"
#include "mmwcov/montecarlo.hpp"
#include "mmwcov/version.hpp"

namespace mmwcov {

enum class Engine { kMonteCarlo, kAnalytic, kDominant };

inline std::string_view engine_name(Engine e) {
  switch (e) {
    case Engine::kMonteCarlo: return "mc";
    case Engine::kAnalytic: return "analytic";
    case Engine::kDominant: return "dominant";
  }
  return "?";
}

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"fig4", "fig5", "fig6", "fig7", "fig8", "custom"};
  return names;
}

/// User-facing configuration. Powers, gains and thresholds stay in dB here;
/// network_params() converts them for the engines.
struct ExperimentConfig {
  std::string scenario = "custom";
  std::uint64_t seed = 1;
  std::size_t trials = 200000;
  unsigned workers = 1;
  std::vector<Engine> engines{Engine::kMonteCarlo, Engine::kAnalytic};
  std::string out_dir = "results";

  double lambda_bs = 0.0008;
  double r_los = 75.0;
  double alpha = 2.0;
  double f_c = 26.5e9;
  double p_dbm = 45.0;
  double sigma2_dbm = -74.0;
  int m_s = 2;
  int m_x = 2;

  int sector_exp = 2;
  std::optional<double> phi_3db;  ///< radians; unset means 2π/2^m
  double g_max_dbi = 10.0;
  double sla_db = 30.0;

  std::vector<double> gamma_db{-10.0, -5.0, 0.0, 5.0, 10.0, 15.0};
  std::vector<Policy> policies{Policy::kMaxPower, Policy::kMinAngle, Policy::kNearest};
  std::optional<std::vector<int>> sector_sweep;
  std::optional<std::vector<double>> lambda_sweep;
  std::optional<std::vector<double>> levels_db;

  ExclusionMode p1_exclusion = ExclusionMode::kBestBeam;
  P2Region p2_region = P2Region::kExactWedges;
  InterferenceReference p2_reference = InterferenceReference::kLink;

  bool operator==(const ExperimentConfig&) const = default;

  bool has_engine(Engine e) const { return std::find(engines.begin(), engines.end(), e) != engines.end(); }

  NetworkParams network_params() const {
    NetworkParams n;
    n.density = lambda_bs;
    n.channel.r_los = r_los;
    n.channel.alpha = alpha;
    n.channel.f_c = f_c;
    n.channel.p_tx = dbm_to_watts(p_dbm);
    n.channel.noise = dbm_to_watts(sigma2_dbm);
    n.channel.m_s = m_s;
    n.channel.m_x = m_x;
    n.antenna.sector_exp = sector_exp;
    n.antenna.phi_3db_rad = phi_3db;
    n.antenna.g_max_db = g_max_dbi;
    n.antenna.sla_db = sla_db;
    return n;
  }

  AnalyticOptions analytic_options() const {
    AnalyticOptions o;
    o.p1_exclusion = p1_exclusion;
    o.p2_region = p2_region;
    o.p2_reference = p2_reference;
    return o;
  }
};

// ---------------------------------------------------------------------------
// Key table.

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc{} || r.ptr != end) throw DomainError("expected a number, got '" + s + "'");
  if (!std::isfinite(v)) throw DomainError("expected a finite number, got '" + s + "'");
  return v;
}

template <class Int>
Int parse_integer(const std::string& s) {
  Int v{};
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc{} || r.ptr != end) throw DomainError("expected an integer, got '" + s + "'");
  return v;
}

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T, class F>
std::string join(const std::vector<T>& v, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i]);
  }
  return s;
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace detail

struct ConfigKey {
  std::string name;  ///< canonical dotted name
  std::string help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;  ///< empty for alias-only keys

  std::string leaf() const {
    const auto dot = name.rfind('.');
    return dot == std::string::npos ? name : name.substr(dot + 1);
  }
  std::string env_name() const {
    std::string s = "MMWCOV_";
    for (char c : name) s += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }
};

inline const std::vector<ConfigKey>& config_keys() {
  using detail::format_double;
  using detail::parse_double;
  using detail::require;
  using C = ExperimentConfig;
  auto positive = [](double C::*field, std::string what) {
    return [field, what](C& c, const std::string& s) {
      const double v = parse_double(s);
      require(v > 0.0, what + " must be > 0 (got " + s + ")");
      c.*field = v;
    };
  };
  auto real = [](double C::*field) { return [field](C& c, const std::string& s) { c.*field = parse_double(s); }; };
  auto show = [](double C::*field) { return [field](const C& c) { return format_double(c.*field); }; };
  auto shape = [](int C::*field) {
    return [field](C& c, const std::string& s) {
      const int v = detail::parse_integer<int>(s);
      require(v >= 1, "fading shape must be an integer >= 1 (got " + s + ")");
      c.*field = v;
    };
  };
  auto show_int = [](int C::*field) { return [field](const C& c) { return std::to_string(c.*field); }; };

  static const std::vector<ConfigKey> keys{
      {"scenario", "fig4|fig5|fig6|fig7|fig8|custom",
       [](C& c, const std::string& s) {
         const auto& n = scenario_names();
         require(std::find(n.begin(), n.end(), s) != n.end(), "unknown scenario '" + s + "'");
         c.scenario = s;
       },
       [](const C& c) { return c.scenario; }},
      {"seed", "master seed (u64)", [](C& c, const std::string& s) { c.seed = detail::parse_integer<std::uint64_t>(s); },
       [](const C& c) { return std::to_string(c.seed); }},
      {"trials", "Monte Carlo trials per series",
       [](C& c, const std::string& s) {
         const auto v = detail::parse_integer<std::size_t>(s);
         require(v >= 1, "trials must be >= 1");
         c.trials = v;
       },
       [](const C& c) { return std::to_string(c.trials); }},
      {"workers", "Monte Carlo threads (0 = hardware concurrency)",
       [](C& c, const std::string& s) { c.workers = detail::parse_integer<unsigned>(s); },
       [](const C& c) { return std::to_string(c.workers); }},
      {"engines", "comma list of mc, analytic, dominant",
       [](C& c, const std::string& s) {
         std::vector<Engine> e;
         for (const auto& p : detail::split_list(s)) {
           Engine v;
           if (p == "mc") v = Engine::kMonteCarlo;
           else if (p == "analytic") v = Engine::kAnalytic;
           else if (p == "dominant") v = Engine::kDominant;
           else throw DomainError("unknown engine '" + p + "' (expected mc, analytic or dominant)");
           if (std::find(e.begin(), e.end(), v) == e.end()) e.push_back(v);
         }
         require(!e.empty(), "at least one engine is required");
         c.engines = e;
       },
       [](const C& c) { return detail::join(c.engines, [](Engine e) { return std::string(engine_name(e)); }); }},
      {"out", "output directory", [](C& c, const std::string& s) {
         require(!s.empty(), "out must not be empty");
         c.out_dir = s;
       },
       [](const C& c) { return c.out_dir; }},

      {"network.lambda_bs", "BS density per m²", positive(&C::lambda_bs, "lambda_bs"), show(&C::lambda_bs)},
      {"network.R_L", "LOS ball radius, m", positive(&C::r_los, "R_L"), show(&C::r_los)},
      {"network.alpha_L", "LOS path-loss exponent", positive(&C::alpha, "alpha_L"), show(&C::alpha)},
      {"network.f_c", "carrier frequency, Hz", positive(&C::f_c, "f_c"), show(&C::f_c)},
      {"network.p_dBm", "transmit power, dBm", real(&C::p_dbm), show(&C::p_dbm)},
      {"network.sigma2_dBm", "noise power, dBm", real(&C::sigma2_dbm), show(&C::sigma2_dbm)},
      {"network.m_s", "serving-link Nakagami shape", shape(&C::m_s), show_int(&C::m_s)},
      {"network.m_x", "interferer Nakagami shape", shape(&C::m_x), show_int(&C::m_x)},
      {"network.m_u", "sets m_s and m_x together",
       [](C& c, const std::string& s) {
         const int v = detail::parse_integer<int>(s);
         require(v >= 1, "fading shape must be an integer >= 1 (got " + s + ")");
         c.m_s = c.m_x = v;
       },
       {}},

      {"antenna.m", "sector exponent; 2^m beams",
       [](C& c, const std::string& s) {
         const int v = detail::parse_integer<int>(s);
         require(v >= 0 && v <= 20, "m must be in [0, 20] (got " + s + ")");
         c.sector_exp = v;
       },
       show_int(&C::sector_exp)},
      {"antenna.phi_3dB", "3 dB beamwidth in radians, or auto for 2π/2^m",
       [](C& c, const std::string& s) {
         if (s == "auto") {
           c.phi_3db.reset();
           return;
         }
         const double v = parse_double(s);
         require(v > 0.0 && v <= kTwoPi, "phi_3dB must be in (0, 2π] (got " + s + ")");
         c.phi_3db = v;
       },
       [](const C& c) { return c.phi_3db ? format_double(*c.phi_3db) : std::string("auto"); }},
      {"antenna.G_max_dBi", "mainlobe gain, dBi", real(&C::g_max_dbi), show(&C::g_max_dbi)},
      {"antenna.SLA_dB", "side-lobe attenuation, dB", positive(&C::sla_db, "SLA_dB"), show(&C::sla_db)},

      {"grid.gamma_dB", "SINR thresholds, dB, strictly increasing",
       [](C& c, const std::string& s) {
         std::vector<double> v;
         for (const auto& p : detail::split_list(s)) v.push_back(parse_double(p));
         require(!v.empty(), "gamma_dB must list at least one threshold");
         for (std::size_t i = 1; i < v.size(); ++i) require(v[i] > v[i - 1], "gamma_dB must be strictly increasing");
         c.gamma_db = v;
       },
       [](const C& c) { return detail::join(c.gamma_db, format_double); }},
      {"grid.policies", "custom scenario policies: comma list of P1, P2, P3",
       [](C& c, const std::string& s) {
         std::vector<Policy> v;
         for (const auto& p : detail::split_list(s)) {
           Policy q;
           if (p == "P1" || p == "1") q = Policy::kMaxPower;
           else if (p == "P2" || p == "2") q = Policy::kMinAngle;
           else if (p == "P3" || p == "3") q = Policy::kNearest;
           else throw DomainError("unknown policy '" + p + "'");
           if (std::find(v.begin(), v.end(), q) == v.end()) v.push_back(q);
         }
         require(!v.empty(), "policies must not be empty");
         c.policies = v;
       },
       [](const C& c) { return detail::join(c.policies, [](Policy p) { return std::string(policy_tag(p)); }); }},
      {"grid.sector_sweep", "sector exponents for fig5-fig8, or auto",
       [](C& c, const std::string& s) {
         if (s == "auto") {
           c.sector_sweep.reset();
           return;
         }
         std::vector<int> v;
         for (const auto& p : detail::split_list(s)) {
           const int m = detail::parse_integer<int>(p);
           require(m >= 0 && m <= 20, "sector exponents must be in [0, 20]");
           v.push_back(m);
         }
         require(!v.empty(), "sector_sweep must not be empty");
         c.sector_sweep = v;
       },
       [](const C& c) {
         return c.sector_sweep ? detail::join(*c.sector_sweep, [](int m) { return std::to_string(m); })
                               : std::string("auto");
       }},
      {"grid.lambda_sweep", "densities for fig4 and fig7, or auto",
       [](C& c, const std::string& s) {
         if (s == "auto") {
           c.lambda_sweep.reset();
           return;
         }
         std::vector<double> v;
         for (const auto& p : detail::split_list(s)) {
           const double l = parse_double(p);
           require(l > 0.0, "lambda_sweep values must be > 0");
           v.push_back(l);
         }
         require(!v.empty(), "lambda_sweep must not be empty");
         c.lambda_sweep = v;
       },
       [](const C& c) { return c.lambda_sweep ? detail::join(*c.lambda_sweep, format_double) : std::string("auto"); }},
      {"grid.levels_dB", "fig4 received-power levels, dB, or auto",
       [](C& c, const std::string& s) {
         if (s == "auto") {
           c.levels_db.reset();
           return;
         }
         std::vector<double> v;
         for (const auto& p : detail::split_list(s)) v.push_back(parse_double(p));
         require(!v.empty(), "levels_dB must not be empty");
         for (std::size_t i = 1; i < v.size(); ++i) require(v[i] > v[i - 1], "levels_dB must be strictly increasing");
         c.levels_db = v;
       },
       [](const C& c) { return c.levels_db ? detail::join(*c.levels_db, format_double) : std::string("auto"); }},

      {"analytic.p1_exclusion", "best_beam|printed",
       [](C& c, const std::string& s) {
         if (s == "best_beam") c.p1_exclusion = ExclusionMode::kBestBeam;
         else if (s == "printed") c.p1_exclusion = ExclusionMode::kPrinted;
         else throw DomainError("expected best_beam or printed, got '" + s + "'");
       },
       [](const C& c) { return std::string(c.p1_exclusion == ExclusionMode::kBestBeam ? "best_beam" : "printed"); }},
      {"analytic.p2_region", "exact|verbatim",
       [](C& c, const std::string& s) {
         if (s == "exact") c.p2_region = P2Region::kExactWedges;
         else if (s == "verbatim") c.p2_region = P2Region::kVerbatim;
         else throw DomainError("expected exact or verbatim, got '" + s + "'");
       },
       [](const C& c) { return std::string(c.p2_region == P2Region::kExactWedges ? "exact" : "verbatim"); }},
      {"association.p2_reference", "link|beam: direction P2 interferer offsets are measured from",
       [](C& c, const std::string& s) {
         if (s == "link") c.p2_reference = InterferenceReference::kLink;
         else if (s == "beam") c.p2_reference = InterferenceReference::kBeam;
         else throw DomainError("expected link or beam, got '" + s + "'");
       },
       [](const C& c) { return std::string(c.p2_reference == InterferenceReference::kLink ? "link" : "beam"); }},
  };
  return keys;
}

/// Resolves a canonical or leaf name. Leaf names are accepted when unique.
inline const ConfigKey* find_config_key(std::string_view name) {
  const auto& keys = config_keys();
  for (const auto& k : keys)
    if (k.name == name) return &k;
  const ConfigKey* hit = nullptr;
  for (const auto& k : keys)
    if (k.leaf() == name) {
      if (hit) return nullptr;
      hit = &k;
    }
  return hit;
}

/// Closest canonical key or leaf to an unknown name, empty when nothing is close.
inline std::string suggest_config_key(std::string_view name) {
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& k : config_keys()) {
    for (const std::string& cand : {k.name, k.leaf()}) {
      const std::size_t d = detail::levenshtein(name, cand);
      if (d < best_d) {
        best_d = d;
        best = cand;
      }
    }
  }
  const std::size_t limit = std::max<std::size_t>(2, name.size() / 3);
  return best_d <= limit ? best : std::string{};
}

// ---------------------------------------------------------------------------
// Parsing and validation.

struct ParseResult {
  ExperimentConfig config;
  std::vector<std::string> warnings;  ///< unknown keys ignored outside strict mode
};

namespace detail {

inline void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line,
                      const std::string& where, bool strict, std::vector<std::string>& warnings) {
  const ConfigKey* k = find_config_key(key);
  if (!k) {
    std::string msg = where + "unknown key '" + key + "'";
    const auto s = suggest_config_key(key);
    if (!s.empty()) msg += " (did you mean '" + s + "'?)";
    if (strict) throw ConfigError(msg, key, line);
    warnings.push_back(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
    return;
  }
  try {
    k->set(cfg, value);
  } catch (const DomainError& e) {
    throw ConfigError(where + k->name + ": " + e.what(), k->name, line);
  }
}

}  // namespace detail

/// Parses `key = value` lines onto `base`. '#' starts a comment.
inline ParseResult parse_config_text(std::string_view text, bool strict = false, ExperimentConfig base = {}) {
  ParseResult r{std::move(base), {}};
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = detail::trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + body + "'", {}, line);
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", {}, line);
    detail::apply_key(r.config, key, value, line, "", strict, r.warnings);
  }
  return r;
}

/// Applies MMWCOV_<SECTION>_<KEY> variables (dots become underscores, upper case).
inline void apply_env_overrides(ExperimentConfig& cfg,
                                const std::function<const char*(const char*)>& getenv_fn = [](const char* n) {
                                  return std::getenv(n);
                                }) {
  std::vector<std::string> unused;
  for (const auto& k : config_keys()) {
    const std::string var = k.env_name();
    if (const char* v = getenv_fn(var.c_str())) detail::apply_key(cfg, k.name, detail::trim(v), 0, "env " + var + ": ", true, unused);
  }
}

/// Cross-field checks that a single key cannot make.
inline void check_config(const ExperimentConfig& cfg) {
  if (cfg.engines.empty()) throw ConfigError("at least one engine is required", "engines");
  const auto& n = scenario_names();
  if (std::find(n.begin(), n.end(), cfg.scenario) == n.end())
    throw ConfigError("unknown scenario '" + cfg.scenario + "'", "scenario");
  try {
    cfg.network_params().validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

/// Emits every canonical key, one per line, in table order.
inline std::string config_to_text(const ExperimentConfig& cfg) {
  std::string s;
  for (const auto& k : config_keys())
    if (k.get) s += k.name + " = " + k.get(cfg) + "\n";
  return s;
}

inline std::map<std::string, std::string> config_to_map(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> m;
  for (const auto& k : config_keys())
    if (k.get) m[k.name] = k.get(cfg);
  return m;
}

/// Reads a config file (or a run manifest, by .json extension), then the
/// environment, then validates.
inline ExperimentConfig validate_config(const std::filesystem::path& path, bool strict = false,
                                        std::vector<std::string>* warnings = nullptr, bool use_env = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ParseResult r;
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) throw ConfigError("manifest has no 'config' object");
    for (const auto& [key, value] : j["config"].items())
      detail::apply_key(r.config, key, value.get<std::string>(), 0, "manifest: ", strict, r.warnings);
  } else {
    r = parse_config_text(buf.str(), strict);
  }
  if (use_env) apply_env_overrides(r.config);
  check_config(r.config);
  if (warnings) *warnings = r.warnings;
  return r.config;
}

// ---------------------------------------------------------------------------
// CSV.

struct Series {
  Engine engine = Engine::kAnalytic;
  std::string label;  ///< policy tag plus sweep qualifiers, e.g. "P1/m=3"
  std::string pair_key;  ///< series from different engines with equal keys are compared
  CoverageCurve curve;
  double runtime_s = 0.0;
};

inline void write_csv(std::ostream& out, const std::vector<Series>& series) {
  out << "x,value,stderr,engine,policy\n";
  char buf[128];
  for (const auto& s : series)
    for (const auto& r : s.curve.rows) {
      std::snprintf(buf, sizeof buf, "%.10e,%.10e,%.10e,", r.x, r.value, r.stderr_);
      out << buf << engine_name(s.engine) << ',' << s.label << '\n';
    }
}

// ---------------------------------------------------------------------------
// Scenarios.

struct ExperimentResult {
  std::vector<std::filesystem::path> files;
  nlohmann::json manifest;
};

namespace detail {

inline std::string qualifier(std::string_view name, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "/%.*s=%g", static_cast<int>(name.size()), name.data(), v);
  return buf;
}

inline std::vector<double> default_levels_db(const NetworkParams& net) {
  const ServingPowerLaw law(net);
  const double lo = std::floor(linear_to_db(law.w_min()) / 2.0) * 2.0 - 4.0;
  const double hi = std::ceil(linear_to_db(law.upper_level(1e-4)) / 2.0) * 2.0;
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += 2.0) v.push_back(x);
  return v;
}

// P(g_max r₁^-α > w | N ≥ 1).
inline double nearest_power_ccdf(double w, const NetworkParams& net) {
  const double rho = std::min(net.channel.r_los, std::pow(net.antenna.g_max() / w, 1.0 / net.channel.alpha));
  const double pl = std::numbers::pi * net.density;
  return -std::expm1(-pl * rho * rho) / -std::expm1(-net.mean_count());
}

template <class F>
double timed(F&& f) {
  const auto a = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count();
}

}  // namespace detail

class ExperimentRunner {
 public:
  using Log = std::function<void(const std::string&)>;

  explicit ExperimentRunner(ExperimentConfig cfg, Log log = {}) : cfg_(std::move(cfg)), log_(std::move(log)) {
    check_config(cfg_);
  }

  /// Computes every series of the scenario without touching the filesystem.
  std::vector<Series> compute() {
    series_.clear();
    notes_.clear();
    const auto& s = cfg_.scenario;
    if (s == "fig4") fig4();
    else if (s == "fig5") sector_compare({Policy::kMaxPower, Policy::kNearest}, {1, 2, 3});
    else if (s == "fig6") sector_compare({Policy::kMaxPower, Policy::kMinAngle}, {1, 2, 3});
    else if (s == "fig7") fig7();
    else if (s == "fig8") fig8();
    else custom();
    return series_;
  }

  ExperimentResult run() {
    compute();
    namespace fs = std::filesystem;
    const fs::path dir(cfg_.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir.string() + "'", "out");

    // One file per engine; fig7 also splits per policy because its rows form a grid.
    std::map<std::string, std::vector<Series>> by_file;
    for (const auto& sr : series_) {
      std::string name = cfg_.scenario + "_" + std::string(engine_name(sr.engine));
      if (cfg_.scenario == "fig7") name += "_" + sr.curve.policy;
      by_file[name + ".csv"].push_back(sr);
    }
    ExperimentResult res;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, group] : by_file) {
      const fs::path p = dir / name;
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      if (!out) throw ConfigError("cannot write '" + p.string() + "'", "out");
      write_csv(out, group);
      out.close();
      if (!out) throw ConfigError("write failed for '" + p.string() + "'", "out");
      std::size_t rows = 0;
      nlohmann::json labels = nlohmann::json::array();
      for (const auto& sr : group) {
        rows += sr.curve.rows.size();
        labels.push_back(sr.label);
      }
      files.push_back({{"path", name}, {"engine", engine_name(group.front().engine)}, {"rows", rows}, {"series", labels}});
      res.files.push_back(p);
    }
    res.manifest = manifest(files);
    const fs::path mp = dir / (cfg_.scenario + "_manifest.json");
    std::ofstream mo(mp, std::ios::binary | std::ios::trunc);
    if (!mo) throw ConfigError("cannot write '" + mp.string() + "'", "out");
    mo << res.manifest.dump(2) << '\n';
    res.files.push_back(mp);
    return res;
  }

  const std::vector<std::string>& notes() const { return notes_; }

 private:
  void say(const std::string& m) {
    if (log_) log_(m);
  }

  SimPlan plan(const NetworkParams& net, Policy p) const {
    SimPlan s;
    s.params = net;
    s.policy = p;
    s.thresholds_db = cfg_.gamma_db;
    s.n_trials = cfg_.trials;
    s.master_seed = cfg_.seed;
    s.workers = cfg_.workers;
    s.p2_reference = cfg_.p2_reference;
    return s;
  }

  void add(Engine e, std::string label, std::string key, std::function<CoverageCurve()> make) {
    say("running " + std::string(engine_name(e)) + " " + label);
    Series s{e, std::move(label), std::move(key), {}, 0.0};
    s.runtime_s = detail::timed([&] { s.curve = make(); });
    series_.push_back(std::move(s));
  }

  CoverageCurve analytic_rows(Policy p, const NetworkParams& net, const std::vector<double>& xs_db) const {
    const auto opt = cfg_.analytic_options();
    CoverageCurve c{"analytic", std::string(policy_tag(p)), {}};
    for (double x : xs_db) c.rows.push_back({x, analytic_coverage(p, db_to_linear(x), net, opt), 0.0, 0});
    return c;
  }

  void coverage_series(Policy p, const NetworkParams& net, const std::string& qual) {
    const std::string label = std::string(policy_tag(p)) + qual;
    if (cfg_.has_engine(Engine::kMonteCarlo)) add(Engine::kMonteCarlo, label, label, [&] { return run_coverage(plan(net, p)); });
    if (cfg_.has_engine(Engine::kAnalytic))
      add(Engine::kAnalytic, label, label, [&] { return analytic_rows(p, net, cfg_.gamma_db); });
  }

  void dominant_series(Policy p, const NetworkParams& net, const std::string& qual) {
    const std::string key = std::string(policy_tag(p)) + "/dominant" + qual;
    if (cfg_.has_engine(Engine::kDominant))
      add(Engine::kDominant, std::string(policy_tag(p)) + qual, key, [&] {
        CoverageCurve c{"dominant", std::string(policy_tag(p)), {}};
        for (double x : cfg_.gamma_db) {
          const double g = db_to_linear(x);
          c.rows.push_back(
              {x, p == Policy::kMinAngle ? coverage_dom_p2(g, net) : coverage_dom_p3(g, net), 0.0, 0});
        }
        return c;
      });
    if (cfg_.has_engine(Engine::kMonteCarlo))
      add(Engine::kMonteCarlo, key, key, [&] { return run_dominant_coverage(plan(net, p)); });
  }

  void skip_engine(Engine e, const std::string& why) {
    if (cfg_.has_engine(e)) notes_.push_back("engine " + std::string(engine_name(e)) + " skipped: " + why);
  }

  void fig4() {
    skip_engine(Engine::kDominant, "fig4 has no dominant-interferer series");
    const auto lambdas = cfg_.lambda_sweep.value_or(std::vector<double>{0.0004, 0.0008, 0.0016});
    for (double l : lambdas) {
      auto cfg = cfg_;
      cfg.lambda_bs = l;
      const auto net = cfg.network_params();
      const auto levels_db = cfg_.levels_db.value_or(detail::default_levels_db(net));
      std::vector<double> levels;
      for (double x : levels_db) levels.push_back(db_to_linear(x));
      for (Policy p : {Policy::kMaxPower, Policy::kNearest}) {
        const std::string label = std::string(policy_tag(p)) + detail::qualifier("lambda", l);
        if (cfg_.has_engine(Engine::kMonteCarlo))
          add(Engine::kMonteCarlo, label, label, [&] {
            auto c = run_power_ccdf(plan(net, p), p, levels);
            for (std::size_t i = 0; i < c.rows.size(); ++i) c.rows[i].x = levels_db[i];
            return c;
          });
        if (cfg_.has_engine(Engine::kAnalytic))
          add(Engine::kAnalytic, label, label, [&] {
            CoverageCurve c{"analytic", std::string(policy_tag(p)), {}};
            const ServingPowerLaw law(net);
            const double nonvoid = -std::expm1(-net.mean_count());
            for (std::size_t i = 0; i < levels.size(); ++i) {
              const double v =
                  p == Policy::kMaxPower ? law.ccdf(levels[i]) / nonvoid : detail::nearest_power_ccdf(levels[i], net);
              c.rows.push_back({levels_db[i], std::clamp(v, 0.0, 1.0), 0.0, 0});
            }
            return c;
          });
      }
    }
  }

  void sector_compare(std::vector<Policy> policies, std::vector<int> default_sweep) {
    skip_engine(Engine::kDominant, cfg_.scenario + " has no dominant-interferer series");
    for (int m : cfg_.sector_sweep.value_or(default_sweep)) {
      auto cfg = cfg_;
      cfg.sector_exp = m;
      const auto net = cfg.network_params();
      for (Policy p : policies) coverage_series(p, net, detail::qualifier("m", m));
    }
  }

  void fig7() {
    skip_engine(Engine::kDominant, "fig7 has no dominant-interferer series");
    const auto lambdas = cfg_.lambda_sweep.value_or(std::vector<double>{0.0004, 0.0008, 0.0016});
    const auto sweep = cfg_.sector_sweep.value_or(std::vector<int>{2, 3, 4, 5, 6});
    const double gamma_db = 3.0;
    for (Policy p : {Policy::kMaxPower, Policy::kNearest}) {
      for (double l : lambdas) {
        const std::string label = std::string(policy_tag(p)) + detail::qualifier("lambda", l);
        auto at = [&](int m) {
          auto cfg = cfg_;
          cfg.lambda_bs = l;
          cfg.sector_exp = m;
          return cfg.network_params();
        };
        if (cfg_.has_engine(Engine::kMonteCarlo))
          add(Engine::kMonteCarlo, label, label, [&] {
            CoverageCurve c{"mc", std::string(policy_tag(p)), {}};
            for (int m : sweep) {
              auto sp = plan(at(m), p);
              sp.thresholds_db = {gamma_db};
              auto row = run_coverage(sp).rows.front();
              row.x = m;
              c.rows.push_back(row);
            }
            return c;
          });
        if (cfg_.has_engine(Engine::kAnalytic))
          add(Engine::kAnalytic, label, label, [&] {
            CoverageCurve c{"analytic", std::string(policy_tag(p)), {}};
            for (int m : sweep)
              c.rows.push_back(
                  {static_cast<double>(m), analytic_coverage(p, db_to_linear(gamma_db), at(m), cfg_.analytic_options()),
                   0.0, 0});
            return c;
          });
      }
    }
  }

  void fig8() {
    for (int m : cfg_.sector_sweep.value_or(std::vector<int>{2, 3})) {
      auto cfg = cfg_;
      cfg.sector_exp = m;
      const auto net = cfg.network_params();
      const std::string q = detail::qualifier("m", m);
      coverage_series(Policy::kMaxPower, net, q);
      dominant_series(Policy::kMinAngle, net, q);
      dominant_series(Policy::kNearest, net, q);
    }
  }

  void custom() {
    const auto net = cfg_.network_params();
    for (Policy p : cfg_.policies) {
      coverage_series(p, net, "");
      if (p != Policy::kMaxPower) dominant_series(p, net, "");
    }
    if (cfg_.has_engine(Engine::kDominant) &&
        std::find(cfg_.policies.begin(), cfg_.policies.end(), Policy::kMaxPower) != cfg_.policies.end())
      notes_.push_back("dominant engine has no P1 law; P1 skipped for it");
  }

  nlohmann::json manifest(const nlohmann::json& files) const {
    nlohmann::json j;
    j["tool"] = "mmwcov";
    j["scenario"] = cfg_.scenario;
    j["seed"] = std::to_string(cfg_.seed);
    j["trials"] = cfg_.trials;
    j["config"] = config_to_map(cfg_);
    j["files"] = files;
    j["versions"] = {{"mmwcov", kVersionString},
                     {"compiler", __VERSION__},
                     {"cxx_standard", __cplusplus},
                     {"boost", BOOST_LIB_VERSION},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    nlohmann::json rt = nlohmann::json::object();
    for (const auto& s : series_) rt[std::string(engine_name(s.engine)) + ":" + s.label] = s.runtime_s;
    j["runtimes_s"] = rt;
    j["tolerance_flags"] = tolerance_flags();
    j["notes"] = notes_;
    return j;
  }

  // MC against each deterministic engine with the same pair key:
  // |a - m| <= max(0.015, 3·stderr) row by row.
  nlohmann::json tolerance_flags() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& mc : series_) {
      if (mc.engine != Engine::kMonteCarlo) continue;
      for (const auto& ref : series_) {
        if (ref.engine == Engine::kMonteCarlo || ref.pair_key != mc.pair_key) continue;
        if (ref.curve.rows.size() != mc.curve.rows.size()) continue;
        double worst = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < mc.curve.rows.size(); ++i) {
          const auto& a = ref.curve.rows[i];
          const auto& b = mc.curve.rows[i];
          const double d = std::abs(a.value - b.value);
          worst = std::max(worst, d);
          ok = ok && d <= std::max(0.015, 3.0 * b.stderr_);
        }
        out.push_back({{"series", mc.pair_key},
                       {"engines", std::string(engine_name(ref.engine)) + " vs mc"},
                       {"max_abs_diff", worst},
                       {"within_tolerance", ok}});
      }
    }
    return out;
  }

  ExperimentConfig cfg_;
  Log log_;
  std::vector<Series> series_;
  std::vector<std::string> notes_;
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, ExperimentRunner::Log log = {}) {
  return ExperimentRunner(cfg, std::move(log)).run();
}

}  // namespace mmwcov
