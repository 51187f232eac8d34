#pragma once

// Weighted annual weather scenarios as hourly capacity-factor series.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "h2dac/error.hpp"

namespace h2dac {

inline constexpr double kHoursPerYear = 8760.0;

struct Scenario {
  double probability = 1.0;
  std::vector<double> wind_cf;
  std::vector<double> solar_cf;

  bool operator==(const Scenario&) const = default;
};

/// A non-empty list of equal-horizon scenarios whose probabilities sum to one.
class ScenarioSet {
 public:
  ScenarioSet() = default;

  /// Validates the invariants. Probabilities are taken as given and must already
  /// sum to one within 1e-9.
  explicit ScenarioSet(std::vector<Scenario> scenarios) : scenarios_(std::move(scenarios)) {
    if (scenarios_.empty()) throw InvalidParameter("ScenarioSet: at least one scenario required");
    horizon_h_ = static_cast<int>(scenarios_.front().wind_cf.size());
    if (horizon_h_ < 1) throw InvalidParameter("ScenarioSet: horizon must be >= 1 hour");
    double total = 0.0;
    for (std::size_t s = 0; s < scenarios_.size(); ++s) {
      const auto& sc = scenarios_[s];
      if (static_cast<int>(sc.wind_cf.size()) != horizon_h_ ||
          static_cast<int>(sc.solar_cf.size()) != horizon_h_)
        throw InvalidParameter("ScenarioSet: scenario " + std::to_string(s) +
                               " has a different series length");
      if (!(sc.probability > 0.0))
        throw InvalidParameter("ScenarioSet: scenario probability must be > 0");
      for (int t = 0; t < horizon_h_; ++t) {
        if (!(sc.wind_cf[t] >= 0.0 && sc.wind_cf[t] <= 1.0) ||
            !(sc.solar_cf[t] >= 0.0 && sc.solar_cf[t] <= 1.0))
          throw InvalidParameter("ScenarioSet: capacity factor outside [0,1] in scenario " +
                                 std::to_string(s) + " hour " + std::to_string(t));
      }
      total += sc.probability;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw InvalidParameter("ScenarioSet: probabilities must sum to 1");
  }

  const std::vector<Scenario>& scenarios() const { return scenarios_; }
  const Scenario& operator[](std::size_t s) const { return scenarios_[s]; }
  std::size_t size() const { return scenarios_.size(); }
  int horizon_h() const { return horizon_h_; }
  /// Factor that turns a per-horizon sum into an annual quantity.
  double annualization_weight() const { return kHoursPerYear / horizon_h_; }

  bool operator==(const ScenarioSet&) const = default;

 private:
  std::vector<Scenario> scenarios_;
  int horizon_h_ = 0;
};

/// Normalizes positive weights to probabilities.
inline std::vector<double> normalize_weights(const std::vector<double>& w) {
  double sum = 0.0;
  for (double v : w) {
    if (!(v > 0.0) || std::isinf(v)) throw InvalidParameter("scenario weights must be positive");
    sum += v;
  }
  std::vector<double> p(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) p[i] = w[i] / sum;
  return p;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, const std::string& where) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw FormatError(where + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

/// Parses one weather CSV (`hour,wind_cf,solar_cf`) into a scenario with probability 1.
inline Scenario parse_weather_csv(std::istream& in, const std::string& label) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(label + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "hour,wind_cf,solar_cf")
    throw FormatError(label + ": header must be exactly 'hour,wind_cf,solar_cf', got '" + line +
                      "'");
  Scenario sc;
  long row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::string where = label + " row " + std::to_string(row);
    auto fields = detail::split_commas(line);
    if (fields.size() != 3) throw FormatError(where + ": expected 3 fields");
    const double hour = detail::parse_double(fields[0], where);
    if (hour != static_cast<double>(row - 1))
      throw FormatError(where + ": hour must be consecutive from 0");
    const double w = detail::parse_double(fields[1], where);
    const double s = detail::parse_double(fields[2], where);
    if (!(w >= 0.0 && w <= 1.0))
      throw RangeError(where + ": wind_cf " + std::string(fields[1]) + " outside [0,1]");
    if (!(s >= 0.0 && s <= 1.0))
      throw RangeError(where + ": solar_cf " + std::string(fields[2]) + " outside [0,1]");
    sc.wind_cf.push_back(w);
    sc.solar_cf.push_back(s);
  }
  if (sc.wind_cf.empty()) throw FormatError(label + ": no data rows");
  return sc;
}

/// One CSV per scenario; weights are normalized to probabilities.
inline ScenarioSet load_weather_csv(const std::vector<std::string>& paths,
                                    const std::vector<double>& weights) {
  if (paths.empty()) throw InvalidParameter("load_weather_csv: no files given");
  if (paths.size() != weights.size())
    throw InvalidParameter("load_weather_csv: one weight per file required");
  const auto probs = normalize_weights(weights);
  std::vector<Scenario> scenarios;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::ifstream in(paths[i], std::ios::binary);
    if (!in) throw IoError("cannot open weather file " + paths[i]);
    Scenario sc = parse_weather_csv(in, paths[i]);
    if (!scenarios.empty() && sc.wind_cf.size() != scenarios.front().wind_cf.size())
      throw ShapeError("weather files have ragged lengths: " + paths[i] + " has " +
                        std::to_string(sc.wind_cf.size()) + " rows, expected " +
                        std::to_string(scenarios.front().wind_cf.size()));
    sc.probability = probs[i];
    scenarios.push_back(std::move(sc));
  }
  return ScenarioSet(std::move(scenarios));
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

/// %g-style rendering with `digits` significant digits, for labels.
inline std::string short_number(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline void write_weather_csv(std::ostream& out, const Scenario& sc) {
  out << "hour,wind_cf,solar_cf\n";
  for (std::size_t t = 0; t < sc.wind_cf.size(); ++t)
    out << t << ',' << format_double(sc.wind_cf[t]) << ',' << format_double(sc.solar_cf[t])
        << '\n';
}

// ---------------------------------------------------------------------------
// Synthetic generator

struct WeatherParams {
  double solar_mean = 0.22;      // long-run solar capacity factor target
  double wind_mean = 0.38;       // long-run wind capacity factor target
  double wind_reversion = 0.08;  // per-hour pull towards wind_mean
  double wind_volatility = 0.06; // per-hour innovation std-dev at noise = 1
  double cloud_depth = 0.6;      // max fractional solar loss on a fully cloudy day
  double noise = 1.0;            // global noise amplitude; 0 gives deterministic series
};

/// Deterministic synthetic scenarios with equal probabilities. Solar is a clipped
/// diurnal sinusoid attenuated by a per-day cloud draw; wind is a clamped
/// Ornstein-Uhlenbeck process.
inline ScenarioSet synthesize_weather(std::uint64_t seed, int horizon_h, int n_scenarios,
                                      const WeatherParams& p = {}) {
  if (horizon_h < 24) throw InvalidParameter("synthesize_weather: horizon_h must be >= 24");
  if (n_scenarios < 1) throw InvalidParameter("synthesize_weather: n_scenarios must be >= 1");
  if (!(p.noise >= 0.0) || !(p.cloud_depth >= 0.0 && p.cloud_depth <= 1.0) ||
      !(p.solar_mean > 0.0 && p.solar_mean <= 1.0) || !(p.wind_mean >= 0.0 && p.wind_mean <= 1.0) ||
      !(p.wind_reversion > 0.0 && p.wind_reversion <= 1.0) || !(p.wind_volatility >= 0.0))
    throw InvalidParameter("synthesize_weather: parameter out of range");

  // The daylight half-sine averages 1/pi over a day; the cloud draw is uniform so
  // its expected attenuation is noise*depth/2.
  const double expected_clear = 1.0 - std::min(1.0, p.noise * p.cloud_depth) * 0.5;
  const double solar_peak = p.solar_mean * std::numbers::pi / expected_clear;

  std::vector<Scenario> scenarios;
  for (int s = 0; s < n_scenarios; ++s) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    // Raw-bit conversions keep the stream identical across standard libraries.
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto gaussian = [&] {
      const double u1 = 1.0 - uniform();
      const double u2 = uniform();
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    };

    Scenario sc;
    sc.probability = 1.0 / n_scenarios;
    sc.wind_cf.resize(horizon_h);
    sc.solar_cf.resize(horizon_h);
    double wind = p.wind_mean;
    double cloud = 0.0;
    for (int t = 0; t < horizon_h; ++t) {
      const int hour_of_day = t % 24;
      if (hour_of_day == 0) cloud = std::min(1.0, p.noise * p.cloud_depth) * uniform();
      const double sun = std::max(0.0, std::sin(std::numbers::pi * (hour_of_day - 6) / 12.0));
      sc.solar_cf[t] = std::clamp(solar_peak * sun * (1.0 - cloud), 0.0, 1.0);

      sc.wind_cf[t] = std::clamp(wind, 0.0, 1.0);
      wind += p.wind_reversion * (p.wind_mean - wind) + p.noise * p.wind_volatility * gaussian();
    }
    scenarios.push_back(std::move(sc));
  }
  return ScenarioSet(std::move(scenarios));
}

/// Keeps the first `new_h` hours of every scenario.
inline ScenarioSet truncate_horizon(const ScenarioSet& set, int new_h) {
  if (new_h < 1 || new_h > set.horizon_h())
    throw InvalidParameter("truncate_horizon: new horizon must lie in [1, " +
                           std::to_string(set.horizon_h()) + "]");
  std::vector<Scenario> out = set.scenarios();
  for (auto& sc : out) {
    sc.wind_cf.resize(new_h);
    sc.solar_cf.resize(new_h);
  }
  return ScenarioSet(std::move(out));
}

}  // namespace h2dac
