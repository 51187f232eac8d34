#pragma once

// Two-stage stochastic capacity-planning LPs for the standalone green-hydrogen
// system, the standalone solid-DAC system and their sector-coupled integration.
//
// First stage: one capacity column per active facility. Second stage: hourly
// dispatch columns per scenario. The objective is the total annualized cost
// sum_i IC_i * X_i * (CRF_i + OM_i); dispatch carries no cost.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "h2dac/domain.hpp"
#include "h2dac/error.hpp"
#include "h2dac/lp.hpp"
#include "h2dac/scenario.hpp"
#include "h2dac/simplex.hpp"

namespace h2dac {

enum class ModelKind { GreenHydrogen, DirectAirCapture, Coupled };

constexpr std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::GreenHydrogen: return "gh";
    case ModelKind::DirectAirCapture: return "dac";
    case ModelKind::Coupled: return "coupled";
  }
  return "?";
}

/// Hourly second-stage decision kinds.
enum class Dispatch {
  WindUsed,        // u_wt  MW
  PvUsed,          // u_pv  MW
  BatteryCharge,   // b_ch  MW
  BatteryDischarge,// b_dis MW
  BatteryLevel,    // b_soc MWh
  ElectrolyzerPower,  // p_el MW
  FuelCellPower,   // p_fc  MW
  TankInflow,      // h_in  t/h
  TankOutflow,     // h_out t/h (to demand)
  TankLevel,       // h_lvl t
  HeatPumpPower,   // p_hp  MW electric
  TesCharge,       // q_ch  MW_th
  TesDischarge,    // q_dis MW_th
  TesLevel,        // q_lvl MWh_th
  DacRate,         // d_dac t CO2/h
  DcToAc,          // x_dc2ac MW
  AcToDc,          // x_ac2dc MW
};
inline constexpr int kNumDispatch = 17;

constexpr std::string_view short_name(Dispatch d) {
  constexpr std::array<std::string_view, kNumDispatch> names = {
      "u_wt", "u_pv", "b_ch", "b_dis", "b_soc", "p_el", "p_fc", "h_in", "h_out",
      "h_lvl", "p_hp", "q_ch", "q_dis", "q_lvl", "d_dac", "x_dc2ac", "x_ac2dc"};
  return names[static_cast<int>(d)];
}

/// Column layout of a built model.
struct VarCatalog {
  ModelKind model = ModelKind::GreenHydrogen;
  BusMode bus = BusMode::DcOnly;
  FacilityKind electrolyzer = FacilityKind::PemElectrolyzer;
  int n_scenarios = 0;
  int horizon_h = 0;

  std::vector<FacilityKind> facilities;  // capacity columns, in column order
  std::array<int, 10> capacity_col{};    // by FacilityKind, -1 when absent
  std::vector<Dispatch> dispatch;        // dispatch kinds present
  std::array<int, kNumDispatch> dispatch_base{};  // first column, -1 when absent

  VarCatalog() {
    capacity_col.fill(-1);
    dispatch_base.fill(-1);
  }

  bool has(FacilityKind k) const { return capacity_col[static_cast<int>(k)] >= 0; }
  bool has(Dispatch d) const { return dispatch_base[static_cast<int>(d)] >= 0; }
  int capacity(FacilityKind k) const { return capacity_col[static_cast<int>(k)]; }
  int col(Dispatch d, int s, int t) const {
    return dispatch_base[static_cast<int>(d)] + s * horizon_h + t;
  }
};

struct BuiltModel {
  LpProblem lp;
  VarCatalog catalog;
};

namespace detail {

enum class Bus { Dc, Ac };

struct BusLayout {
  bool has_dc = false, has_ac = false;
  // Bus a device of the given native current attaches to.
  Bus place(Bus native) const {
    if (native == Bus::Dc) return has_dc ? Bus::Dc : Bus::Ac;
    return has_ac ? Bus::Ac : Bus::Dc;
  }
};

}  // namespace detail

/// Hybrid-mode bus interconnect efficiencies {DC->AC, AC->DC}. A device
/// already pays its own same-current converter on its native bus, so crossing
/// costs only the remainder of one AC/DC conversion: a DC device reaches the AC
/// bus at exactly ac_dc overall, as it would behind its own inverter. Capped at
/// 1 so no conversion loop can create energy.
inline std::pair<double, double> interconnect_efficiency(const ConverterEfficiencies& c) {
  return {std::min(1.0, c.ac_dc / c.dc_dc), std::min(1.0, c.ac_dc / c.ac_ac)};
}

namespace detail {

class ModelBuilder {
 public:
  ModelBuilder(const SystemConfig& cfg, const ScenarioSet& scen, ModelKind kind,
               FacilityKind electrolyzer, BusMode bus)
      : cfg_(cfg), scen_(scen) {
    cat_.model = kind;
    cat_.bus = bus;
    cat_.electrolyzer = electrolyzer;
    cat_.n_scenarios = static_cast<int>(scen.size());
    cat_.horizon_h = scen.horizon_h();
    if (cat_.horizon_h < 1 || cat_.n_scenarios < 1)
      throw InputError("model build: scenario set has zero-length horizon");
    if (!is_electrolyzer(electrolyzer))
      throw BuildError("model build: " + std::string(to_string(electrolyzer)) +
                       " is not an electrolyzer kind");
    gh_ = kind != ModelKind::DirectAirCapture;
    dac_ = kind != ModelKind::GreenHydrogen;
    layout_.has_dc = bus != BusMode::AcOnly;
    layout_.has_ac = bus != BusMode::DcOnly;
  }

  BuiltModel build() {
    std::vector<FacilityKind> kinds = {FacilityKind::WindTurbine, FacilityKind::PvPanel,
                                       FacilityKind::Battery};
    if (gh_) {
      kinds.push_back(cat_.electrolyzer);
      kinds.push_back(FacilityKind::FuelCell);
      kinds.push_back(FacilityKind::H2Tank);
    }
    if (dac_) {
      kinds.push_back(FacilityKind::DacPlant);
      kinds.push_back(FacilityKind::HeatPump);
      kinds.push_back(FacilityKind::Tes);
    }
    std::sort(kinds.begin(), kinds.end());
    for (auto k : kinds) {
      const FacilitySpec* spec = cfg_.find(k);
      if (!spec)
        throw BuildError("model build: configuration has no facility spec for " +
                         std::string(to_string(k)));
      const int c = lp_.add_col("X_" + std::string(to_string(k)),
                                unit_annual_cost(*spec, cfg_.economics.discount_rate));
      cat_.capacity_col[static_cast<int>(k)] = c;
      cat_.facilities.push_back(k);
    }

    std::vector<Dispatch> vars = {Dispatch::WindUsed, Dispatch::PvUsed, Dispatch::BatteryCharge,
                                  Dispatch::BatteryDischarge, Dispatch::BatteryLevel};
    if (gh_)
      for (auto d : {Dispatch::ElectrolyzerPower, Dispatch::FuelCellPower, Dispatch::TankInflow,
                     Dispatch::TankOutflow, Dispatch::TankLevel})
        vars.push_back(d);
    if (dac_)
      for (auto d : {Dispatch::HeatPumpPower, Dispatch::TesCharge, Dispatch::TesDischarge,
                     Dispatch::TesLevel, Dispatch::DacRate})
        vars.push_back(d);
    if (layout_.has_dc && layout_.has_ac) {
      vars.push_back(Dispatch::DcToAc);
      vars.push_back(Dispatch::AcToDc);
    }
    const int S = cat_.n_scenarios, H = cat_.horizon_h;
    for (auto d : vars) {
      cat_.dispatch_base[static_cast<int>(d)] = lp_.n_cols();
      cat_.dispatch.push_back(d);
      for (int s = 0; s < S; ++s)
        for (int t = 0; t < H; ++t)
          lp_.add_col(std::string(short_name(d)) + "[" + std::to_string(s) + "," +
                          std::to_string(t) + "]",
                      0.0);
    }

    for (int s = 0; s < S; ++s)
      for (int t = 0; t < H; ++t) add_hour(s, t);
    add_co2_rows();

    lp_.name = std::string(to_string(cat_.model));
    return {std::move(lp_), std::move(cat_)};
  }

 private:
  const SystemConfig& cfg_;
  const ScenarioSet& scen_;
  VarCatalog cat_;
  LpProblem lp_;
  BusLayout layout_;
  bool gh_ = false, dac_ = false;

  int X(FacilityKind k) const { return cat_.capacity(k); }
  int V(Dispatch d, int s, int t) const { return cat_.col(d, s, t); }
  int next(int t) const { return (t + 1) % cat_.horizon_h; }

  std::string tag(const char* base, int s, int t) const {
    return std::string(base) + "[" + std::to_string(s) + "," + std::to_string(t) + "]";
  }

  double conv(Bus native, Bus bus) const {
    const auto& c = cfg_.converters;
    if (native != bus) return c.ac_dc;
    return bus == Bus::Dc ? c.dc_dc : c.ac_ac;
  }

  void add_hour(int s, int t) {
    const auto& in = cfg_.intensities;
    const auto& sc = scen_[s];
    std::vector<RowEntry> dc_bus, ac_bus;
    auto bus_row = [&](Bus b) -> std::vector<RowEntry>& { return b == Bus::Dc ? dc_bus : ac_bus; };

    // A source injects conv * output; a converter-fed load draws p / conv;
    // a load on its native bus draws p directly.
    auto source = [&](Bus native, int col) {
      const Bus b = layout_.place(native);
      bus_row(b).push_back({col, conv(native, b)});
    };
    auto storage_charge = [&](Bus native, int col) {
      const Bus b = layout_.place(native);
      bus_row(b).push_back({col, -1.0 / conv(native, b)});
    };
    auto load = [&](Bus native, int col, double intensity) {
      const Bus b = layout_.place(native);
      const double eff = native == b ? 1.0 : cfg_.converters.ac_dc;
      bus_row(b).push_back({col, -intensity / eff});
    };

    // Renewable resource limits.
    source(Bus::Ac, V(Dispatch::WindUsed, s, t));
    source(Bus::Dc, V(Dispatch::PvUsed, s, t));
    lp_.add_row(tag("wind_cap", s, t),
                {{V(Dispatch::WindUsed, s, t), 1.0}, {X(FacilityKind::WindTurbine), -sc.wind_cf[t]}},
                RowSense::Le, 0.0);
    lp_.add_row(tag("pv_cap", s, t),
                {{V(Dispatch::PvUsed, s, t), 1.0}, {X(FacilityKind::PvPanel), -sc.solar_cf[t]}},
                RowSense::Le, 0.0);

    // Battery.
    source(Bus::Dc, V(Dispatch::BatteryDischarge, s, t));
    storage_charge(Bus::Dc, V(Dispatch::BatteryCharge, s, t));
    lp_.add_row(tag("batt_soc", s, t),
                {{V(Dispatch::BatteryLevel, s, next(t)), 1.0},
                 {V(Dispatch::BatteryLevel, s, t), -1.0},
                 {V(Dispatch::BatteryCharge, s, t), -in.battery_charge_eff},
                 {V(Dispatch::BatteryDischarge, s, t), 1.0 / in.battery_discharge_eff}},
                RowSense::Eq, 0.0);
    const int xb = X(FacilityKind::Battery);
    lp_.add_row(tag("batt_cap", s, t), {{V(Dispatch::BatteryLevel, s, t), 1.0}, {xb, -1.0}},
                RowSense::Le, 0.0);
    lp_.add_row(tag("batt_ch_cap", s, t),
                {{V(Dispatch::BatteryCharge, s, t), 1.0}, {xb, -1.0 / in.battery_duration_h}},
                RowSense::Le, 0.0);
    lp_.add_row(tag("batt_dis_cap", s, t),
                {{V(Dispatch::BatteryDischarge, s, t), 1.0}, {xb, -1.0 / in.battery_duration_h}},
                RowSense::Le, 0.0);

    if (gh_) add_hydrogen_hour(s, t, load, source);
    if (dac_) add_dac_hour(s, t, load);

    if (layout_.has_dc && layout_.has_ac) {
      const auto [to_ac, to_dc] = interconnect_efficiency(cfg_.converters);
      dc_bus.push_back({V(Dispatch::DcToAc, s, t), -1.0});
      dc_bus.push_back({V(Dispatch::AcToDc, s, t), to_dc});
      ac_bus.push_back({V(Dispatch::DcToAc, s, t), to_ac});
      ac_bus.push_back({V(Dispatch::AcToDc, s, t), -1.0});
    }
    if (layout_.has_dc) lp_.add_row(tag("bus_dc", s, t), std::move(dc_bus), RowSense::Eq, 0.0);
    if (layout_.has_ac) lp_.add_row(tag("bus_ac", s, t), std::move(ac_bus), RowSense::Eq, 0.0);
  }

  template <class Load, class Source>
  void add_hydrogen_hour(int s, int t, Load& load, Source& source) {
    const auto& in = cfg_.intensities;
    const FacilityKind el = cat_.electrolyzer;
    const int xe = X(el);
    const int p_el = V(Dispatch::ElectrolyzerPower, s, t);
    const int p_fc = V(Dispatch::FuelCellPower, s, t);
    load(Bus::Dc, p_el, 1.0);
    source(Bus::Dc, p_fc);

    lp_.add_row(tag("el_max", s, t), {{p_el, 1.0}, {xe, -1.0}}, RowSense::Le, 0.0);
    const double min_load = cfg_.find(el)->min_load_fraction;
    if (min_load > 0.0)
      lp_.add_row(tag("el_min", s, t), {{p_el, 1.0}, {xe, -min_load}}, RowSense::Ge, 0.0);

    // Hydrogen stream: production + tank withdrawal - tank injection = demand.
    const double demand = cfg_.h2_demand / kHoursPerYear;
    lp_.add_row(tag("h2_balance", s, t),
                {{p_el, 1.0 / in.electrolyzer_mwh_per_t_h2},
                 {V(Dispatch::TankInflow, s, t), -1.0},
                 {V(Dispatch::TankOutflow, s, t), 1.0}},
                RowSense::Eq, demand);
    // The fuel cell draws from the tank.
    lp_.add_row(tag("tank_level", s, t),
                {{V(Dispatch::TankLevel, s, next(t)), 1.0},
                 {V(Dispatch::TankLevel, s, t), -1.0},
                 {V(Dispatch::TankInflow, s, t), -1.0},
                 {V(Dispatch::TankOutflow, s, t), 1.0},
                 {p_fc, 1.0 / in.fuel_cell_mwh_out_per_t_h2}},
                RowSense::Eq, 0.0);
    lp_.add_row(tag("tank_cap", s, t),
                {{V(Dispatch::TankLevel, s, t), 1.0}, {X(FacilityKind::H2Tank), -1.0}},
                RowSense::Le, 0.0);
    lp_.add_row(tag("fc_cap", s, t), {{p_fc, 1.0}, {X(FacilityKind::FuelCell), -1.0}},
                RowSense::Le, 0.0);
  }

  template <class Load>
  void add_dac_hour(int s, int t, Load& load) {
    const auto& in = cfg_.intensities;
    const int p_hp = V(Dispatch::HeatPumpPower, s, t);
    const int d_dac = V(Dispatch::DacRate, s, t);
    load(Bus::Ac, p_hp, 1.0);
    load(Bus::Ac, d_dac, in.dac_elec_mwh_per_t_co2);

    lp_.add_row(tag("heat_balance", s, t),
                {{p_hp, in.heat_pump_cop},
                 {V(Dispatch::TesDischarge, s, t), in.tes_discharge_eff},
                 {V(Dispatch::TesCharge, s, t), -1.0},
                 {d_dac, -in.dac_heat_mwhth_per_t_co2}},
                RowSense::Eq, 0.0);
    lp_.add_row(tag("tes_level", s, t),
                {{V(Dispatch::TesLevel, s, next(t)), 1.0},
                 {V(Dispatch::TesLevel, s, t), -1.0},
                 {V(Dispatch::TesCharge, s, t), -in.tes_charge_eff},
                 {V(Dispatch::TesDischarge, s, t), 1.0}},
                RowSense::Eq, 0.0);
    lp_.add_row(tag("tes_cap", s, t),
                {{V(Dispatch::TesLevel, s, t), 1.0}, {X(FacilityKind::Tes), -1.0}},
                RowSense::Le, 0.0);
    lp_.add_row(tag("dac_cap", s, t), {{d_dac, 1.0}, {X(FacilityKind::DacPlant), -1.0}},
                RowSense::Le, 0.0);
    const int xh = X(FacilityKind::HeatPump);
    lp_.add_row(tag("hp_max", s, t), {{p_hp, 1.0}, {xh, -1.0}}, RowSense::Le, 0.0);
    const double min_load = cfg_.find(FacilityKind::HeatPump)->min_load_fraction;
    if (min_load > 0.0)
      lp_.add_row(tag("hp_min", s, t), {{p_hp, 1.0}, {xh, -min_load}}, RowSense::Ge, 0.0);
  }

  void add_co2_rows() {
    if (!dac_) return;
    const int S = cat_.n_scenarios, H = cat_.horizon_h;
    const double w = scen_.annualization_weight();
    if (cfg_.co2_enforcement == Co2Enforcement::PerScenario) {
      for (int s = 0; s < S; ++s) {
        std::vector<RowEntry> row;
        for (int t = 0; t < H; ++t) row.push_back({V(Dispatch::DacRate, s, t), w});
        lp_.add_row("co2_target[" + std::to_string(s) + "]", std::move(row), RowSense::Ge,
                    cfg_.co2_target);
      }
    } else {
      std::vector<RowEntry> row;
      for (int s = 0; s < S; ++s)
        for (int t = 0; t < H; ++t)
          row.push_back({V(Dispatch::DacRate, s, t), scen_[s].probability * w});
      lp_.add_row("co2_target", std::move(row), RowSense::Ge, cfg_.co2_target);
    }
  }
};

}  // namespace detail

/// Standalone green-hydrogen system on a DC bus.
inline BuiltModel build_standalone_gh(const SystemConfig& cfg, const ScenarioSet& scen,
                                      FacilityKind electrolyzer) {
  return detail::ModelBuilder(cfg, scen, ModelKind::GreenHydrogen, electrolyzer, BusMode::DcOnly)
      .build();
}

/// Standalone solid-DAC system on an AC bus.
inline BuiltModel build_standalone_dac(const SystemConfig& cfg, const ScenarioSet& scen) {
  return detail::ModelBuilder(cfg, scen, ModelKind::DirectAirCapture,
                              FacilityKind::PemElectrolyzer, BusMode::AcOnly)
      .build();
}

/// Sector-coupled system under `cfg.bus_mode`.
inline BuiltModel build_coupled(const SystemConfig& cfg, const ScenarioSet& scen,
                                FacilityKind electrolyzer) {
  return detail::ModelBuilder(cfg, scen, ModelKind::Coupled, electrolyzer, cfg.bus_mode).build();
}

inline BuiltModel build_model(const SystemConfig& cfg, const ScenarioSet& scen, ModelKind kind,
                              FacilityKind electrolyzer) {
  switch (kind) {
    case ModelKind::GreenHydrogen: return build_standalone_gh(cfg, scen, electrolyzer);
    case ModelKind::DirectAirCapture: return build_standalone_dac(cfg, scen);
    case ModelKind::Coupled: return build_coupled(cfg, scen, electrolyzer);
  }
  throw BuildError("unknown model kind");
}

// ---------------------------------------------------------------------------
// Solutions

struct FacilityResult {
  FacilityKind kind;
  double capacity = 0.0;     // capacity units
  double annual_cost = 0.0;  // MM$/yr
  bool operator==(const FacilityResult&) const = default;
};

/// Optimal design mapped back to model entities.
struct DesignResult {
  ModelKind model = ModelKind::GreenHydrogen;
  BusMode bus = BusMode::DcOnly;
  FacilityKind electrolyzer = FacilityKind::PemElectrolyzer;
  std::vector<FacilityResult> facilities;  // in capacity-column order
  /// dispatch[d][s][t]; empty for kinds absent from the model.
  std::array<std::vector<std::vector<double>>, kNumDispatch> dispatch;
  std::vector<std::vector<double>> wind_curtailed, pv_curtailed;  // [s][t], MW
  std::vector<double> probabilities;
  int horizon_h = 0;
  double annualization_weight = 1.0;
  double total_tac = 0.0;        // MM$/yr, recomputed from capacities
  double solver_objective = 0.0; // MM$/yr, as reported by the solver
  double annual_h2 = 0.0;        // t/yr, probability weighted
  std::vector<double> annual_co2;  // t/yr per scenario
  long solver_iterations = 0;

  double capacity(FacilityKind k) const {
    for (const auto& f : facilities)
      if (f.kind == k) return f.capacity;
    return 0.0;
  }
  double cost(FacilityKind k) const {
    for (const auto& f : facilities)
      if (f.kind == k) return f.annual_cost;
    return 0.0;
  }
  bool has(Dispatch d) const { return !dispatch[static_cast<int>(d)].empty(); }
  const std::vector<std::vector<double>>& series(Dispatch d) const {
    return dispatch[static_cast<int>(d)];
  }
  double expected_annual_co2() const {
    double v = 0.0;
    for (std::size_t s = 0; s < annual_co2.size(); ++s) v += probabilities[s] * annual_co2[s];
    return v;
  }
};

/// Maps an optimal solution back onto capacities, dispatch and costs.
inline DesignResult extract_design(const LpProblem& lp, const VarCatalog& cat,
                                   const SolveResult& sol, const SystemConfig& cfg,
                                   const ScenarioSet& scen) {
  if (sol.status != SolveStatus::Optimal)
    throw InputError("extract_design: solver status is " + std::string(to_string(sol.status)) +
                     ", not Optimal");
  if (static_cast<int>(sol.primal.size()) != lp.n_cols())
    throw InputError("extract_design: solution does not match the LP");
  const int S = cat.n_scenarios, H = cat.horizon_h;
  if (static_cast<int>(scen.size()) != S || scen.horizon_h() != H)
    throw InputError("extract_design: scenario set does not match the catalog");

  // Clamp solver round-off at zero; anything beyond round-off is a real violation.
  auto nonneg = [](double v, const std::string& what) {
    if (v < -1e-6 * (1.0 + std::abs(v))) throw InputError("extract_design: negative " + what);
    return v > 0.0 ? v : 0.0;
  };

  DesignResult d;
  d.model = cat.model;
  d.bus = cat.bus;
  d.electrolyzer = cat.electrolyzer;
  d.horizon_h = H;
  d.annualization_weight = scen.annualization_weight();
  d.solver_objective = sol.objective;
  d.solver_iterations = sol.iterations;
  for (int s = 0; s < S; ++s) d.probabilities.push_back(scen[s].probability);

  const double r = cfg.economics.discount_rate;
  for (auto k : cat.facilities) {
    const double cap = nonneg(sol.primal[cat.capacity(k)], std::string(to_string(k)) + " capacity");
    const double cost = annualized_cost(*cfg.find(k), cap, r);
    d.facilities.push_back({k, cap, cost});
    d.total_tac += cost;
  }
  for (auto v : cat.dispatch) {
    auto& series = d.dispatch[static_cast<int>(v)];
    series.assign(S, std::vector<double>(H, 0.0));
    for (int s = 0; s < S; ++s)
      for (int t = 0; t < H; ++t)
        series[s][t] = nonneg(sol.primal[cat.col(v, s, t)], std::string(short_name(v)) + " dispatch");
  }
  const double x_wt = d.capacity(FacilityKind::WindTurbine);
  const double x_pv = d.capacity(FacilityKind::PvPanel);
  d.wind_curtailed.assign(S, std::vector<double>(H, 0.0));
  d.pv_curtailed.assign(S, std::vector<double>(H, 0.0));
  for (int s = 0; s < S; ++s)
    for (int t = 0; t < H; ++t) {
      const double wc = scen[s].wind_cf[t] * x_wt - d.series(Dispatch::WindUsed)[s][t];
      const double pc = scen[s].solar_cf[t] * x_pv - d.series(Dispatch::PvUsed)[s][t];
      d.wind_curtailed[s][t] = wc > 0.0 ? wc : 0.0;
      d.pv_curtailed[s][t] = pc > 0.0 ? pc : 0.0;
    }

  const double w = scen.annualization_weight();
  if (d.has(Dispatch::ElectrolyzerPower)) {
    for (int s = 0; s < S; ++s) {
      double sum = 0.0;
      for (double p : d.series(Dispatch::ElectrolyzerPower)[s]) sum += p;
      d.annual_h2 += scen[s].probability * w * sum / cfg.intensities.electrolyzer_mwh_per_t_h2;
    }
  }
  if (d.has(Dispatch::DacRate)) {
    for (int s = 0; s < S; ++s) {
      double sum = 0.0;
      for (double v : d.series(Dispatch::DacRate)[s]) sum += v;
      d.annual_co2.push_back(w * sum);
    }
  } else {
    d.annual_co2.assign(S, 0.0);
  }
  return d;
}

struct DesignSolveOptions {
  SolveOptions solver;
  /// Second pass minimizing storage throughput and inter-bus transfer with the
  /// TAC held at its optimum; makes the reported dispatch reproducible.
  bool tie_break = false;
  double tie_break_tac_slack = 1e-8;  // relative
};

struct DesignSolve {
  SolveResult solve;
  std::optional<DesignResult> design;  // set when Optimal
};

/// Builds nothing: solves `model`, optionally runs the tie-break pass and extracts the design.
inline DesignSolve solve_design(const BuiltModel& model, const SystemConfig& cfg,
                                const ScenarioSet& scen, const DesignSolveOptions& opts = {}) {
  DesignSolve out;
  out.solve = solve(model.lp, opts.solver);
  if (out.solve.status != SolveStatus::Optimal) return out;

  if (opts.tie_break) {
    const auto& cat = model.catalog;
    LpProblem second = model.lp;
    std::vector<RowEntry> tac_row;
    for (auto k : cat.facilities) {
      const int c = cat.capacity(k);
      tac_row.push_back({c, model.lp.obj(c)});
      second.set_obj(c, 0.0);
    }
    const double tac = out.solve.objective;
    second.add_row("tac_fixed", std::move(tac_row), RowSense::Le,
                   tac + opts.tie_break_tac_slack * std::abs(tac));
    for (auto v : {Dispatch::BatteryCharge, Dispatch::BatteryDischarge, Dispatch::TankInflow,
                   Dispatch::TankOutflow, Dispatch::TesCharge, Dispatch::TesDischarge,
                   Dispatch::DcToAc, Dispatch::AcToDc}) {
      if (!cat.has(v)) continue;
      for (int s = 0; s < cat.n_scenarios; ++s)
        for (int t = 0; t < cat.horizon_h; ++t) second.set_obj(cat.col(v, s, t), 1.0);
    }
    auto refined = solve(second, opts.solver);
    if (refined.status == SolveStatus::Optimal) {
      refined.primal.resize(model.lp.n_cols());
      refined.objective = model.lp.objective_value(refined.primal);
      refined.iterations += out.solve.iterations;
      refined.dual.resize(model.lp.n_rows());
      refined.row_activity.resize(model.lp.n_rows());
      out.solve = std::move(refined);
    }
  }
  out.design = extract_design(model.lp, model.catalog, out.solve, cfg, scen);
  return out;
}

}  // namespace h2dac
