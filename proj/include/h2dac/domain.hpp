#pragma once

// Facility economics, system configuration and annualized-cost arithmetic.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "h2dac/error.hpp"

namespace h2dac {

enum class FacilityKind {
  WindTurbine,
  PvPanel,
  Battery,
  PemElectrolyzer,
  AlkalineElectrolyzer,
  FuelCell,
  H2Tank,
  DacPlant,
  HeatPump,
  Tes,
};

inline constexpr std::array<FacilityKind, 10> kAllFacilityKinds = {
    FacilityKind::WindTurbine,     FacilityKind::PvPanel,
    FacilityKind::Battery,         FacilityKind::PemElectrolyzer,
    FacilityKind::AlkalineElectrolyzer, FacilityKind::FuelCell,
    FacilityKind::H2Tank,          FacilityKind::DacPlant,
    FacilityKind::HeatPump,        FacilityKind::Tes,
};

constexpr std::string_view to_string(FacilityKind k) {
  switch (k) {
    case FacilityKind::WindTurbine: return "WindTurbine";
    case FacilityKind::PvPanel: return "PvPanel";
    case FacilityKind::Battery: return "Battery";
    case FacilityKind::PemElectrolyzer: return "PemElectrolyzer";
    case FacilityKind::AlkalineElectrolyzer: return "AlkalineElectrolyzer";
    case FacilityKind::FuelCell: return "FuelCell";
    case FacilityKind::H2Tank: return "H2Tank";
    case FacilityKind::DacPlant: return "DacPlant";
    case FacilityKind::HeatPump: return "HeatPump";
    case FacilityKind::Tes: return "Tes";
  }
  return "?";
}

inline std::optional<FacilityKind> facility_kind_from_string(std::string_view s) {
  for (auto k : kAllFacilityKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

constexpr bool is_electrolyzer(FacilityKind k) {
  return k == FacilityKind::PemElectrolyzer || k == FacilityKind::AlkalineElectrolyzer;
}

/// Economics and operating envelope of one technology. Capacity units depend on
/// the kind: MW for power devices, MWh for the battery, t H2 for the tank,
/// t CO2/h for the DAC plant and MWh_th for thermal storage.
struct FacilitySpec {
  FacilityKind kind = FacilityKind::WindTurbine;
  double investment_cost = 0.0;  // MM$ per capacity unit
  int lifetime = 1;              // years
  double om_fraction = 0.0;      // of investment cost, per year
  double min_load_fraction = 0.0;

  bool operator==(const FacilitySpec&) const = default;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct EconomicParams {
  double discount_rate = kMissing;  // required, no default
  bool operator==(const EconomicParams& o) const {
    return discount_rate == o.discount_rate ||
           (std::isnan(discount_rate) && std::isnan(o.discount_rate));
  }
};

/// Conversion intensities. Everything but the battery duration is required input.
struct EnergyIntensities {
  double electrolyzer_mwh_per_t_h2 = kMissing;
  double fuel_cell_mwh_out_per_t_h2 = kMissing;
  double dac_elec_mwh_per_t_co2 = kMissing;
  double dac_heat_mwhth_per_t_co2 = kMissing;
  double heat_pump_cop = kMissing;
  double battery_charge_eff = kMissing;
  double battery_discharge_eff = kMissing;
  double tes_charge_eff = kMissing;
  double tes_discharge_eff = kMissing;
  double battery_duration_h = 8.0;

  bool operator==(const EnergyIntensities&) const = default;
};

struct ConverterEfficiencies {
  double dc_dc = 0.98;
  double ac_ac = 0.98;
  double ac_dc = 0.95;  // both directions
  bool operator==(const ConverterEfficiencies&) const = default;
};

enum class BusMode { DcOnly, AcOnly, Hybrid };
enum class Co2Enforcement { PerScenario, Expectation };

constexpr std::string_view to_string(BusMode m) {
  switch (m) {
    case BusMode::DcOnly: return "DcOnly";
    case BusMode::AcOnly: return "AcOnly";
    case BusMode::Hybrid: return "Hybrid";
  }
  return "?";
}

constexpr std::string_view to_string(Co2Enforcement e) {
  return e == Co2Enforcement::PerScenario ? "PerScenario" : "Expectation";
}

struct SystemConfig {
  std::vector<FacilitySpec> facilities;
  EconomicParams economics;
  EnergyIntensities intensities;
  ConverterEfficiencies converters;
  double h2_demand = 0.0;   // t H2 / yr, delivered at a constant hourly rate
  double co2_target = 0.0;  // t CO2 / yr
  BusMode bus_mode = BusMode::Hybrid;
  Co2Enforcement co2_enforcement = Co2Enforcement::PerScenario;
  std::string notes;

  const FacilitySpec* find(FacilityKind k) const {
    for (const auto& f : facilities)
      if (f.kind == k) return &f;
    return nullptr;
  }
  FacilitySpec* find(FacilityKind k) {
    for (auto& f : facilities)
      if (f.kind == k) return &f;
    return nullptr;
  }

  bool operator==(const SystemConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Annualization

/// Capital recovery factor r(1+r)^L / ((1+r)^L - 1); 1/L in the r -> 0 limit.
inline double crf(double rate, int lifetime) {
  if (lifetime < 1) throw InvalidParameter("crf: lifetime must be >= 1 year");
  if (!(rate >= 0.0) || !(rate < 1.0))
    throw InvalidParameter("crf: discount rate must lie in [0, 1)");
  if (rate == 0.0) return 1.0 / lifetime;
  // expm1/log1p keep precision for small r where (1+r)^L - 1 cancels.
  const double growth_minus_one = std::expm1(lifetime * std::log1p(rate));
  return rate * (growth_minus_one + 1.0) / growth_minus_one;
}

/// Annual cost of one capacity unit: IC * (CRF + O&M).
inline double unit_annual_cost(const FacilitySpec& spec, double rate) {
  return spec.investment_cost * (crf(rate, spec.lifetime) + spec.om_fraction);
}

/// MM$/yr for `capacity` units of `spec`.
inline double annualized_cost(const FacilitySpec& spec, double capacity, double rate) {
  if (!(capacity >= 0.0)) throw InvalidParameter("annualized_cost: capacity must be >= 0");
  return unit_annual_cost(spec, rate) * capacity;
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void require_fraction(const std::string& key, double v, bool allow_zero = true) {
  if (std::isnan(v)) throw ValidationError(key, "is required");
  if (v > 1.0 || v < 0.0 || (!allow_zero && v == 0.0))
    throw ValidationError(key, "must lie in " + std::string(allow_zero ? "[0, 1]" : "(0, 1]") +
                                   ", got " + std::to_string(v));
}

inline void require_positive(const std::string& key, double v) {
  if (std::isnan(v)) throw ValidationError(key, "is required");
  if (!(v > 0.0) || std::isinf(v))
    throw ValidationError(key, "must be strictly positive and finite, got " + std::to_string(v));
}

}  // namespace detail

/// Checks every invariant and returns the normalized config (facilities ordered
/// by kind). Idempotent.
inline SystemConfig validate_config(SystemConfig cfg) {
  using detail::require_fraction;
  using detail::require_positive;

  std::set<FacilityKind> seen;
  for (std::size_t i = 0; i < cfg.facilities.size(); ++i) {
    const auto& f = cfg.facilities[i];
    const std::string prefix = "facilities[" + std::string(to_string(f.kind)) + "].";
    if (!seen.insert(f.kind).second)
      throw ValidationError("facilities", "duplicate facility kind " + std::string(to_string(f.kind)));
    if (!(f.investment_cost >= 0.0) || std::isinf(f.investment_cost))
      throw ValidationError(prefix + "investment_cost", "must be finite and >= 0");
    if (f.lifetime < 1) throw ValidationError(prefix + "lifetime", "must be >= 1");
    require_fraction(prefix + "om_fraction", f.om_fraction);
    require_fraction(prefix + "min_load_fraction", f.min_load_fraction);
  }
  std::sort(cfg.facilities.begin(), cfg.facilities.end(),
            [](const FacilitySpec& a, const FacilitySpec& b) { return a.kind < b.kind; });

  const double r = cfg.economics.discount_rate;
  if (std::isnan(r)) throw ValidationError("economics.discount_rate", "is required");
  if (!(r >= 0.0 && r < 1.0))
    throw ValidationError("economics.discount_rate", "must lie in [0, 1)");

  const auto& in = cfg.intensities;
  require_positive("intensities.electrolyzer_mwh_per_t_h2", in.electrolyzer_mwh_per_t_h2);
  require_positive("intensities.fuel_cell_mwh_out_per_t_h2", in.fuel_cell_mwh_out_per_t_h2);
  require_positive("intensities.dac_elec_mwh_per_t_co2", in.dac_elec_mwh_per_t_co2);
  require_positive("intensities.dac_heat_mwhth_per_t_co2", in.dac_heat_mwhth_per_t_co2);
  require_positive("intensities.heat_pump_cop", in.heat_pump_cop);
  if (in.heat_pump_cop < 1.0) throw ValidationError("intensities.heat_pump_cop", "must be >= 1");
  require_fraction("intensities.battery_charge_eff", in.battery_charge_eff, false);
  require_fraction("intensities.battery_discharge_eff", in.battery_discharge_eff, false);
  require_fraction("intensities.tes_charge_eff", in.tes_charge_eff, false);
  require_fraction("intensities.tes_discharge_eff", in.tes_discharge_eff, false);
  require_positive("intensities.battery_duration_h", in.battery_duration_h);

  require_fraction("converters.dc_dc", cfg.converters.dc_dc, false);
  require_fraction("converters.ac_ac", cfg.converters.ac_ac, false);
  require_fraction("converters.ac_dc", cfg.converters.ac_dc, false);

  if (!(cfg.h2_demand >= 0.0) || std::isinf(cfg.h2_demand))
    throw ValidationError("demand.h2_t_per_yr", "must be finite and >= 0");
  if (!(cfg.co2_target >= 0.0) || std::isinf(cfg.co2_target))
    throw ValidationError("demand.co2_t_per_yr", "must be finite and >= 0");
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON schema

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& where,
                                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ValidationError(where, "must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ValidationError(where.empty() ? key : where + "." + key, "unknown key");
  }
}

inline double get_number(const json& obj, const std::string& where, const char* key,
                         std::optional<double> fallback = std::nullopt) {
  auto it = obj.find(key);
  const std::string full = where.empty() ? key : where + "." + key;
  if (it == obj.end()) {
    if (fallback) return *fallback;
    throw ValidationError(full, "is required");
  }
  if (!it->is_number()) throw ValidationError(full, "must be a number");
  return it->get<double>();
}

}  // namespace detail

/// Parses the JSON configuration document, fills defaults and validates it.
inline SystemConfig config_from_json(const nlohmann::json& doc) {
  using detail::get_number;
  using detail::reject_unknown_keys;

  reject_unknown_keys(doc, "",
                      {"facilities", "economics", "intensities", "converters", "demand",
                       "bus_mode", "co2_enforcement", "notes"});
  SystemConfig cfg;

  if (!doc.contains("facilities") || !doc["facilities"].is_array())
    throw ValidationError("facilities", "must be an array");
  for (const auto& f : doc["facilities"]) {
    reject_unknown_keys(f, "facilities[]",
                        {"kind", "investment_cost", "lifetime", "om_fraction", "min_load_fraction"});
    if (!f.contains("kind") || !f["kind"].is_string())
      throw ValidationError("facilities[].kind", "is required");
    const auto kind = facility_kind_from_string(f["kind"].get<std::string>());
    if (!kind) throw ValidationError("facilities[].kind", "unknown kind " + f["kind"].dump());
    const std::string where = "facilities[" + std::string(to_string(*kind)) + "]";
    FacilitySpec s;
    s.kind = *kind;
    s.investment_cost = get_number(f, where, "investment_cost");
    const double life = get_number(f, where, "lifetime");
    if (life != std::floor(life)) throw ValidationError(where + ".lifetime", "must be an integer");
    s.lifetime = static_cast<int>(life);
    s.om_fraction = get_number(f, where, "om_fraction");
    s.min_load_fraction = get_number(f, where, "min_load_fraction", 0.0);
    cfg.facilities.push_back(s);
  }

  if (!doc.contains("economics")) throw ValidationError("economics", "is required");
  reject_unknown_keys(doc["economics"], "economics", {"discount_rate"});
  cfg.economics.discount_rate = get_number(doc["economics"], "economics", "discount_rate");

  if (!doc.contains("intensities")) throw ValidationError("intensities", "is required");
  {
    const auto& j = doc["intensities"];
    reject_unknown_keys(j, "intensities",
                        {"electrolyzer_mwh_per_t_h2", "fuel_cell_mwh_out_per_t_h2",
                         "dac_elec_mwh_per_t_co2", "dac_heat_mwhth_per_t_co2", "heat_pump_cop",
                         "battery_charge_eff", "battery_discharge_eff", "tes_charge_eff",
                         "tes_discharge_eff", "battery_duration_h"});
    auto& in = cfg.intensities;
    in.electrolyzer_mwh_per_t_h2 = get_number(j, "intensities", "electrolyzer_mwh_per_t_h2");
    in.fuel_cell_mwh_out_per_t_h2 = get_number(j, "intensities", "fuel_cell_mwh_out_per_t_h2");
    in.dac_elec_mwh_per_t_co2 = get_number(j, "intensities", "dac_elec_mwh_per_t_co2");
    in.dac_heat_mwhth_per_t_co2 = get_number(j, "intensities", "dac_heat_mwhth_per_t_co2");
    in.heat_pump_cop = get_number(j, "intensities", "heat_pump_cop");
    in.battery_charge_eff = get_number(j, "intensities", "battery_charge_eff");
    in.battery_discharge_eff = get_number(j, "intensities", "battery_discharge_eff");
    in.tes_charge_eff = get_number(j, "intensities", "tes_charge_eff");
    in.tes_discharge_eff = get_number(j, "intensities", "tes_discharge_eff");
    in.battery_duration_h = get_number(j, "intensities", "battery_duration_h", 8.0);
  }

  if (doc.contains("converters")) {
    const auto& j = doc["converters"];
    reject_unknown_keys(j, "converters", {"dc_dc", "ac_ac", "ac_dc"});
    cfg.converters.dc_dc = get_number(j, "converters", "dc_dc", 0.98);
    cfg.converters.ac_ac = get_number(j, "converters", "ac_ac", 0.98);
    cfg.converters.ac_dc = get_number(j, "converters", "ac_dc", 0.95);
  }

  if (!doc.contains("demand")) throw ValidationError("demand", "is required");
  reject_unknown_keys(doc["demand"], "demand", {"h2_t_per_yr", "co2_t_per_yr"});
  cfg.h2_demand = get_number(doc["demand"], "demand", "h2_t_per_yr", 0.0);
  cfg.co2_target = get_number(doc["demand"], "demand", "co2_t_per_yr", 0.0);

  if (doc.contains("bus_mode")) {
    const auto s = doc["bus_mode"].is_string() ? doc["bus_mode"].get<std::string>() : "";
    if (s == "DcOnly") cfg.bus_mode = BusMode::DcOnly;
    else if (s == "AcOnly") cfg.bus_mode = BusMode::AcOnly;
    else if (s == "Hybrid") cfg.bus_mode = BusMode::Hybrid;
    else throw ValidationError("bus_mode", "must be one of DcOnly, AcOnly, Hybrid");
  }
  if (doc.contains("co2_enforcement")) {
    const auto s =
        doc["co2_enforcement"].is_string() ? doc["co2_enforcement"].get<std::string>() : "";
    if (s == "PerScenario") cfg.co2_enforcement = Co2Enforcement::PerScenario;
    else if (s == "Expectation") cfg.co2_enforcement = Co2Enforcement::Expectation;
    else throw ValidationError("co2_enforcement", "must be PerScenario or Expectation");
  }
  if (doc.contains("notes")) {
    if (!doc["notes"].is_string()) throw ValidationError("notes", "must be a string");
    cfg.notes = doc["notes"].get<std::string>();
  }
  return validate_config(std::move(cfg));
}

inline nlohmann::json config_to_json(const SystemConfig& cfg) {
  nlohmann::json doc;
  doc["facilities"] = nlohmann::json::array();
  for (const auto& f : cfg.facilities) {
    doc["facilities"].push_back({{"kind", std::string(to_string(f.kind))},
                                 {"investment_cost", f.investment_cost},
                                 {"lifetime", f.lifetime},
                                 {"om_fraction", f.om_fraction},
                                 {"min_load_fraction", f.min_load_fraction}});
  }
  doc["economics"] = {{"discount_rate", cfg.economics.discount_rate}};
  const auto& in = cfg.intensities;
  doc["intensities"] = {{"electrolyzer_mwh_per_t_h2", in.electrolyzer_mwh_per_t_h2},
                        {"fuel_cell_mwh_out_per_t_h2", in.fuel_cell_mwh_out_per_t_h2},
                        {"dac_elec_mwh_per_t_co2", in.dac_elec_mwh_per_t_co2},
                        {"dac_heat_mwhth_per_t_co2", in.dac_heat_mwhth_per_t_co2},
                        {"heat_pump_cop", in.heat_pump_cop},
                        {"battery_charge_eff", in.battery_charge_eff},
                        {"battery_discharge_eff", in.battery_discharge_eff},
                        {"tes_charge_eff", in.tes_charge_eff},
                        {"tes_discharge_eff", in.tes_discharge_eff},
                        {"battery_duration_h", in.battery_duration_h}};
  doc["converters"] = {{"dc_dc", cfg.converters.dc_dc},
                       {"ac_ac", cfg.converters.ac_ac},
                       {"ac_dc", cfg.converters.ac_dc}};
  doc["demand"] = {{"h2_t_per_yr", cfg.h2_demand}, {"co2_t_per_yr", cfg.co2_target}};
  doc["bus_mode"] = std::string(to_string(cfg.bus_mode));
  doc["co2_enforcement"] = std::string(to_string(cfg.co2_enforcement));
  if (!cfg.notes.empty()) doc["notes"] = cfg.notes;
  return doc;
}

inline SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

}  // namespace h2dac
