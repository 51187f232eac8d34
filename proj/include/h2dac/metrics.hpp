#pragma once

// Levelized costs, Improvement/Synergy and grouped TAC tables.
//
// Units: TAC in MM$/yr (1 MM$ = 1e6 $), hydrogen in t/yr (1 kt = 1e3 t),
// CO2 in t/yr (1 Mt = 1e6 t).

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "h2dac/domain.hpp"
#include "h2dac/error.hpp"
#include "h2dac/formulator.hpp"

namespace h2dac {

inline constexpr double kDollarsPerMillion = 1e6;
inline constexpr double kKgPerTonne = 1e3;

/// $/kg H2 from MM$/yr and t/yr.
inline double lcoh(double tac_gh, double annual_h2) {
  if (!(annual_h2 > 0.0)) throw DomainError("lcoh: annual hydrogen output must be > 0");
  return tac_gh * kDollarsPerMillion / (annual_h2 * kKgPerTonne);
}

/// $/t CO2 from MM$/yr and t/yr.
inline double lcod(double tac_dac, double annual_co2) {
  if (!(annual_co2 > 0.0)) throw DomainError("lcod: annual CO2 removal must be > 0");
  return tac_dac * kDollarsPerMillion / annual_co2;
}

inline double improvement(double tac_gh, double tac_dac, double tac_coupled) {
  return tac_gh + tac_dac - tac_coupled;
}

inline double synergy(double tac_gh, double tac_dac, double tac_coupled) {
  const double base = tac_gh + tac_dac;
  if (!(base > 0.0)) throw DomainError("synergy: standalone TAC sum must be > 0");
  return improvement(tac_gh, tac_dac, tac_coupled) / base;
}

/// Probability-weighted utilization: sum_s p_s * w * sum_t dispatch[s][t] over
/// capacity * 8760, where w = 8760 / horizon turns a horizon sum into a year.
inline double capacity_factor(const std::vector<std::vector<double>>& dispatch,
                              const std::vector<double>& probabilities, double capacity,
                              double annualization_weight) {
  if (!(capacity > 0.0)) throw DomainError("capacity_factor: capacity must be > 0");
  if (dispatch.size() != probabilities.size())
    throw InvalidParameter("capacity_factor: one probability per scenario required");
  double annual = 0.0;
  for (std::size_t s = 0; s < dispatch.size(); ++s) {
    double sum = 0.0;
    for (double v : dispatch[s]) sum += v;
    annual += probabilities[s] * annualization_weight * sum;
  }
  return annual / (capacity * kHoursPerYear);
}

/// Single-series convenience form (one scenario, weight 8760 / series length).
inline double capacity_factor(const std::vector<double>& dispatch, double capacity) {
  if (dispatch.empty()) throw InvalidParameter("capacity_factor: empty series");
  return capacity_factor({dispatch}, {1.0}, capacity,
                         kHoursPerYear / static_cast<double>(dispatch.size()));
}

// ---------------------------------------------------------------------------
// Grouped TAC tables

enum class CostGroup { PowerSources, Battery, Electrolyzer, FuelCell, H2Tank, Dac, HeatPump, Tes };

inline constexpr std::array<CostGroup, 8> kAllCostGroups = {
    CostGroup::PowerSources, CostGroup::Battery, CostGroup::Electrolyzer, CostGroup::FuelCell,
    CostGroup::H2Tank,       CostGroup::Dac,     CostGroup::HeatPump,     CostGroup::Tes,
};

/// Column key used in CSV and JSON output.
constexpr std::string_view column_key(CostGroup g) {
  switch (g) {
    case CostGroup::PowerSources: return "power_sources";
    case CostGroup::Battery: return "battery";
    case CostGroup::Electrolyzer: return "electrolyzer";
    case CostGroup::FuelCell: return "fuel_cell";
    case CostGroup::H2Tank: return "h2_tank";
    case CostGroup::Dac: return "dac";
    case CostGroup::HeatPump: return "heat_pump";
    case CostGroup::Tes: return "tes";
  }
  return "?";
}

constexpr std::string_view display_name(CostGroup g) {
  switch (g) {
    case CostGroup::PowerSources: return "Power Sources";
    case CostGroup::Battery: return "Battery";
    case CostGroup::Electrolyzer: return "Electrolyzer";
    case CostGroup::FuelCell: return "Fuel Cell";
    case CostGroup::H2Tank: return "H2 Tank";
    case CostGroup::Dac: return "DAC";
    case CostGroup::HeatPump: return "Heat Pump";
    case CostGroup::Tes: return "TES";
  }
  return "?";
}

constexpr CostGroup group_of(FacilityKind k) {
  switch (k) {
    case FacilityKind::WindTurbine:
    case FacilityKind::PvPanel: return CostGroup::PowerSources;
    case FacilityKind::Battery: return CostGroup::Battery;
    case FacilityKind::PemElectrolyzer:
    case FacilityKind::AlkalineElectrolyzer: return CostGroup::Electrolyzer;
    case FacilityKind::FuelCell: return CostGroup::FuelCell;
    case FacilityKind::H2Tank: return CostGroup::H2Tank;
    case FacilityKind::DacPlant: return CostGroup::Dac;
    case FacilityKind::HeatPump: return CostGroup::HeatPump;
    case FacilityKind::Tes: return CostGroup::Tes;
  }
  return CostGroup::PowerSources;
}

struct TacBreakdown {
  std::vector<FacilityResult> facilities;  // per facility, in catalog order
  std::array<double, 8> groups{};          // indexed like kAllCostGroups
  double total = 0.0;

  double group(CostGroup g) const { return groups[static_cast<int>(g)]; }
  bool operator==(const TacBreakdown&) const = default;
};

inline TacBreakdown tac_breakdown(const DesignResult& design) {
  TacBreakdown b;
  b.facilities = design.facilities;
  for (const auto& f : design.facilities) {
    b.groups[static_cast<int>(group_of(f.kind))] += f.annual_cost;
    b.total += f.annual_cost;
  }
  return b;
}

struct CapacityFactorEntry {
  FacilityKind kind;
  double value;
  bool operator==(const CapacityFactorEntry&) const = default;
};

/// Capacity factors of the facilities whose output is a dispatch series:
/// wind and PV (energy used), electrolyzer, fuel cell, heat pump and DAC.
/// Facilities with zero capacity are skipped.
inline std::vector<CapacityFactorEntry> capacity_factors(const DesignResult& d) {
  std::vector<CapacityFactorEntry> out;
  auto add = [&](FacilityKind k, Dispatch v) {
    const double cap = d.capacity(k);
    if (!(cap > 0.0) || !d.has(v)) return;
    out.push_back({k, capacity_factor(d.series(v), d.probabilities, cap, d.annualization_weight)});
  };
  for (const auto& f : d.facilities) {
    switch (f.kind) {
      case FacilityKind::WindTurbine: add(f.kind, Dispatch::WindUsed); break;
      case FacilityKind::PvPanel: add(f.kind, Dispatch::PvUsed); break;
      case FacilityKind::PemElectrolyzer:
      case FacilityKind::AlkalineElectrolyzer: add(f.kind, Dispatch::ElectrolyzerPower); break;
      case FacilityKind::FuelCell: add(f.kind, Dispatch::FuelCellPower); break;
      case FacilityKind::HeatPump: add(f.kind, Dispatch::HeatPumpPower); break;
      case FacilityKind::DacPlant: add(f.kind, Dispatch::DacRate); break;
      default: break;
    }
  }
  return out;
}

/// Single-design summary (what `optimize` reports).
struct DesignMetrics {
  ModelKind model = ModelKind::Coupled;
  BusMode bus = BusMode::Hybrid;
  FacilityKind electrolyzer = FacilityKind::PemElectrolyzer;
  TacBreakdown breakdown;
  std::optional<double> lcoh;  // standalone GH designs only
  std::optional<double> lcod;  // standalone DAC designs only
  double annual_h2 = 0.0;
  double annual_co2 = 0.0;
  std::vector<CapacityFactorEntry> capacity_factors;
  long solver_iterations = 0;
  bool operator==(const DesignMetrics&) const = default;
};

/// LCOH is reported for the standalone GH model and LCOD for the standalone
/// DAC model; a coupled design reports neither because its TAC cannot be
/// split between the two products.
inline DesignMetrics design_metrics(const DesignResult& d) {
  DesignMetrics m;
  m.model = d.model;
  m.bus = d.bus;
  m.electrolyzer = d.electrolyzer;
  m.breakdown = tac_breakdown(d);
  m.annual_h2 = d.annual_h2;
  m.annual_co2 = d.expected_annual_co2();
  if (d.model == ModelKind::GreenHydrogen && m.annual_h2 > 0.0) m.lcoh = lcoh(d.total_tac, m.annual_h2);
  if (d.model == ModelKind::DirectAirCapture && m.annual_co2 > 0.0)
    m.lcod = lcod(d.total_tac, m.annual_co2);
  m.capacity_factors = capacity_factors(d);
  m.solver_iterations = d.solver_iterations;
  return m;
}

/// Side-by-side comparison of the standalone and coupled designs.
struct MetricsReport {
  FacilityKind electrolyzer = FacilityKind::PemElectrolyzer;
  std::optional<double> lcoh;  // $/kg, from the standalone GH design
  std::optional<double> lcod;  // $/t, from the standalone DAC design
  double improvement = 0.0;    // MM$/yr
  std::optional<double> synergy;  // fraction; empty when both standalone TACs are 0
  TacBreakdown gh, dac, coupled;
  // Per-group synergy; empty where undefined (rendered as an em dash).
  std::array<std::optional<double>, 8> group_synergy{};
  std::vector<CapacityFactorEntry> cf_gh, cf_dac, cf_coupled;

  double tac_gh() const { return gh.total; }
  double tac_dac() const { return dac.total; }
  double tac_coupled() const { return coupled.total; }
  bool operator==(const MetricsReport&) const = default;
};

/// Synergy of one cost group; undefined when the coupled entry is zero or the
/// standalone entries sum to zero.
inline std::optional<double> group_synergy(double gh, double dac, double coupled) {
  if (coupled == 0.0 || !(gh + dac > 0.0)) return std::nullopt;
  return synergy(gh, dac, coupled);
}

inline MetricsReport compare_designs(const DesignResult& gh, const DesignResult& dac,
                                     const DesignResult& coupled) {
  MetricsReport r;
  r.electrolyzer = coupled.electrolyzer;
  r.gh = tac_breakdown(gh);
  r.dac = tac_breakdown(dac);
  r.coupled = tac_breakdown(coupled);
  if (gh.annual_h2 > 0.0) r.lcoh = lcoh(gh.total_tac, gh.annual_h2);
  const double co2 = dac.expected_annual_co2();
  if (co2 > 0.0) r.lcod = lcod(dac.total_tac, co2);
  r.improvement = improvement(gh.total_tac, dac.total_tac, coupled.total_tac);
  if (gh.total_tac + dac.total_tac > 0.0)
    r.synergy = synergy(gh.total_tac, dac.total_tac, coupled.total_tac);
  for (std::size_t g = 0; g < kAllCostGroups.size(); ++g)
    r.group_synergy[g] = group_synergy(r.gh.groups[g], r.dac.groups[g], r.coupled.groups[g]);
  r.cf_gh = capacity_factors(gh);
  r.cf_dac = capacity_factors(dac);
  r.cf_coupled = capacity_factors(coupled);
  return r;
}

}  // namespace h2dac
