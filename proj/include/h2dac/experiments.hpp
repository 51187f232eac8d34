#pragma once

// Batch campaigns: CO2 removal-rate sweep, investment-cost sensitivity,
// heat-pump min-load sweep and bus-topology comparison.
//
// Every campaign expands into independent solve jobs. Jobs may run on a small
// thread pool; results are written into slots indexed by job, so the assembled
// SweepResult does not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "h2dac/audit.hpp"
#include "h2dac/domain.hpp"
#include "h2dac/error.hpp"
#include "h2dac/formulator.hpp"
#include "h2dac/metrics.hpp"
#include "h2dac/scenario.hpp"

namespace h2dac {

inline constexpr double kMolarMassCo2 = 44.01;  // g/mol
inline constexpr double kMolarMassH2 = 2.016;   // g/mol

/// (mass_CO2 / 44.01) / (mass_H2 / 2.016).
inline double co2_h2_molar_ratio(double co2_t, double h2_t) {
  if (!(h2_t > 0.0)) throw DomainError("co2_h2_molar_ratio: hydrogen mass must be > 0");
  return (co2_t / kMolarMassCo2) / (h2_t / kMolarMassH2);
}

/// 0.1 Mt to 1.3 Mt in 0.2 Mt steps, in t CO2/yr.
inline std::vector<double> default_removal_rates() {
  std::vector<double> r;
  for (int i = 0; i < 7; ++i) r.push_back(1e5 + 2e5 * i);
  return r;
}

inline std::vector<double> default_hp_levels() { return {0.40, 0.30, 0.20, 0.10}; }

struct ExperimentOptions {
  DesignSolveOptions solve;
  int threads = 1;
};

/// One model solve inside a sweep point.
struct ModelRun {
  ModelKind model = ModelKind::Coupled;
  BusMode bus = BusMode::Hybrid;
  SolveStatus status = SolveStatus::IterationLimit;
  std::optional<DesignResult> design;
  double audit_violation = 0.0;  // max(bound, scaled row) violation
  long iterations = 0;
  std::vector<CapacityFactorEntry> capacity_factors;

  std::optional<double> tac() const {
    if (!design) return std::nullopt;
    return design->total_tac;
  }
};

struct SweepPoint {
  double axis_value = 0.0;
  std::string label;
  bool feasible = true;  // every run in the point solved to Optimal
  std::vector<ModelRun> runs;
  std::optional<MetricsReport> metrics;  // when GH, DAC and coupled all solved
  std::optional<double> molar_ratio;
  std::optional<double> tac_difference;      // coupled TAC minus baseline coupled TAC
  std::optional<double> synergy_difference;  // synergy minus baseline synergy
  std::optional<double> tac_ratio_dac;       // standalone DAC TAC over the base level
  std::optional<double> tac_ratio_coupled;
  bool argmin = false;

  const ModelRun* run(ModelKind m) const {
    for (const auto& r : runs)
      if (r.model == m) return &r;
    return nullptr;
  }
  std::optional<double> tac(ModelKind m) const {
    const auto* r = run(m);
    return r ? r->tac() : std::nullopt;
  }
};

struct SweepResult {
  std::string sweep;       // removal | sensitivity | hp-minload | compare-bus
  std::string axis_label;
  FacilityKind electrolyzer = FacilityKind::PemElectrolyzer;
  std::vector<SweepPoint> points;
  std::optional<std::size_t> baseline;

  long total_iterations() const {
    long n = 0;
    for (const auto& p : points)
      for (const auto& r : p.runs) n += r.iterations;
    return n;
  }
};

namespace detail {

struct Job {
  SystemConfig cfg;
  ModelKind model;
};

inline ModelRun run_job(const Job& job, const ScenarioSet& scen, FacilityKind el,
                        const DesignSolveOptions& opts) {
  const auto built = build_model(job.cfg, scen, job.model, el);
  ModelRun run;
  run.model = job.model;
  run.bus = built.catalog.bus;
  auto solved = solve_design(built, job.cfg, scen, opts);
  run.status = solved.solve.status;
  run.iterations = solved.solve.iterations;
  if (solved.design) {
    const auto audit = audit_solution(built.lp, solved.solve.primal);
    run.audit_violation = std::max(audit.max_bound_violation, audit.max_row_violation);
    run.capacity_factors = capacity_factors(*solved.design);
    run.design = std::move(solved.design);
  }
  return run;
}

/// Runs all jobs; slot i receives job i. The first exception (by job index) is rethrown.
inline std::vector<ModelRun> run_jobs(const std::vector<Job>& jobs, const ScenarioSet& scen,
                                      FacilityKind el, const ExperimentOptions& opts) {
  std::vector<ModelRun> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  auto work = [&](std::size_t i) {
    try {
      out[i] = run_job(jobs[i], scen, el, opts.solve);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(jobs.size(), static_cast<std::size_t>(std::max(1, opts.threads)));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline void finish_point(SweepPoint& p) {
  p.feasible = std::all_of(p.runs.begin(), p.runs.end(),
                           [](const ModelRun& r) { return r.status == SolveStatus::Optimal; });
  const auto* gh = p.run(ModelKind::GreenHydrogen);
  const auto* dac = p.run(ModelKind::DirectAirCapture);
  const auto* cp = p.run(ModelKind::Coupled);
  if (gh && dac && cp && gh->design && dac->design && cp->design)
    p.metrics = compare_designs(*gh->design, *dac->design, *cp->design);
}

inline void require_electrolyzer(const SystemConfig& cfg, FacilityKind el) {
  if (!is_electrolyzer(el)) throw InvalidParameter("electrolyzer kind required");
  if (!cfg.find(el))
    throw BuildError("configuration has no facility spec for " + std::string(to_string(el)));
}

}  // namespace detail

/// Standalone GH, standalone DAC and coupled solves per CO2 target (t/yr).
/// GH does not depend on the target, so it is solved once and shared.
inline SweepResult sweep_removal_rate(const SystemConfig& cfg, const ScenarioSet& scen,
                                      FacilityKind electrolyzer, const std::vector<double>& rates,
                                      const ExperimentOptions& opts = {}) {
  if (rates.empty()) throw InvalidParameter("sweep_removal_rate: no rates given");
  for (double r : rates)
    if (!(r >= 0.0) || !std::isfinite(r))
      throw InvalidParameter("sweep_removal_rate: rates must be finite and >= 0");
  detail::require_electrolyzer(cfg, electrolyzer);

  std::vector<detail::Job> jobs;
  jobs.push_back({cfg, ModelKind::GreenHydrogen});
  for (double r : rates) {
    SystemConfig c = cfg;
    c.co2_target = r;
    jobs.push_back({c, ModelKind::DirectAirCapture});
    jobs.push_back({c, ModelKind::Coupled});
  }
  auto runs = detail::run_jobs(jobs, scen, electrolyzer, opts);

  SweepResult res;
  res.sweep = "removal";
  res.axis_label = "co2_target_t_per_yr";
  res.electrolyzer = electrolyzer;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    SweepPoint p;
    p.axis_value = rates[i];
    p.label = short_number(rates[i] / 1e6) + " Mt";
    p.runs = {runs[0], std::move(runs[1 + 2 * i]), std::move(runs[2 + 2 * i])};
    if (cfg.h2_demand > 0.0) p.molar_ratio = co2_h2_molar_ratio(rates[i], cfg.h2_demand);
    detail::finish_point(p);
    res.points.push_back(std::move(p));
  }
  return res;
}

enum class SensitivityTarget { PowerSources, Battery, Electrolyzer, Dac };

constexpr std::string_view to_string(SensitivityTarget t) {
  switch (t) {
    case SensitivityTarget::PowerSources: return "power_sources";
    case SensitivityTarget::Battery: return "battery";
    case SensitivityTarget::Electrolyzer: return "electrolyzer";
    case SensitivityTarget::Dac: return "dac";
  }
  return "?";
}

inline std::optional<SensitivityTarget> sensitivity_target_from_string(std::string_view s) {
  for (auto t : {SensitivityTarget::PowerSources, SensitivityTarget::Battery,
                 SensitivityTarget::Electrolyzer, SensitivityTarget::Dac})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

inline std::vector<SensitivityTarget> all_sensitivity_targets() {
  return {SensitivityTarget::PowerSources, SensitivityTarget::Battery,
          SensitivityTarget::Electrolyzer, SensitivityTarget::Dac};
}

/// Multiplies the investment cost of every facility in the target group.
inline SystemConfig scale_investment(SystemConfig cfg, SensitivityTarget target, double factor) {
  for (auto& f : cfg.facilities) {
    bool hit = false;
    switch (target) {
      case SensitivityTarget::PowerSources:
        hit = f.kind == FacilityKind::WindTurbine || f.kind == FacilityKind::PvPanel;
        break;
      case SensitivityTarget::Battery: hit = f.kind == FacilityKind::Battery; break;
      case SensitivityTarget::Electrolyzer: hit = is_electrolyzer(f.kind); break;
      case SensitivityTarget::Dac: hit = f.kind == FacilityKind::DacPlant; break;
    }
    if (hit) f.investment_cost *= factor;
  }
  return cfg;
}

/// Baseline point first, then (target, +delta) and (target, -delta) for each target.
inline SweepResult sensitivity_costs(const SystemConfig& cfg, const ScenarioSet& scen,
                                     FacilityKind electrolyzer, double delta,
                                     const std::vector<SensitivityTarget>& targets,
                                     const ExperimentOptions& opts = {}) {
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidParameter("sensitivity_costs: delta must lie in (0, 1)");
  if (targets.empty()) throw InvalidParameter("sensitivity_costs: no targets given");
  detail::require_electrolyzer(cfg, electrolyzer);

  struct Case {
    std::string label;
    double axis;
    SystemConfig cfg;
  };
  std::vector<Case> cases{{"baseline", 0.0, cfg}};
  for (auto t : targets)
    for (int sign : {1, -1}) {
      const double f = 1.0 + sign * delta;
      cases.push_back({std::string(to_string(t)) + (sign > 0 ? "+" : "-") +
                           short_number(delta * 100.0) + "%",
                       sign * delta, scale_investment(cfg, t, f)});
    }
  std::vector<detail::Job> jobs;
  for (const auto& c : cases)
    for (auto m : {ModelKind::GreenHydrogen, ModelKind::DirectAirCapture, ModelKind::Coupled})
      jobs.push_back({c.cfg, m});
  auto runs = detail::run_jobs(jobs, scen, electrolyzer, opts);

  SweepResult res;
  res.sweep = "sensitivity";
  res.axis_label = "investment_cost_change";
  res.electrolyzer = electrolyzer;
  res.baseline = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    SweepPoint p;
    p.axis_value = cases[i].axis;
    p.label = cases[i].label;
    for (int k = 0; k < 3; ++k) p.runs.push_back(std::move(runs[3 * i + k]));
    detail::finish_point(p);
    res.points.push_back(std::move(p));
  }
  const auto& base = res.points.front();
  for (auto& p : res.points) {
    const auto tb = base.tac(ModelKind::Coupled), tp = p.tac(ModelKind::Coupled);
    if (tb && tp) p.tac_difference = *tp - *tb;
    if (base.metrics && p.metrics && base.metrics->synergy && p.metrics->synergy)
      p.synergy_difference = *p.metrics->synergy - *base.metrics->synergy;
  }
  return res;
}

/// DAC and coupled solves per heat-pump min-load level; levels[0] is the base.
inline SweepResult sweep_heatpump_minload(const SystemConfig& cfg, const ScenarioSet& scen,
                                          FacilityKind electrolyzer,
                                          const std::vector<double>& levels,
                                          const ExperimentOptions& opts = {}) {
  if (levels.empty()) throw InvalidParameter("sweep_heatpump_minload: no levels given");
  for (double l : levels)
    if (!(l >= 0.0 && l <= 1.0))
      throw InvalidParameter("sweep_heatpump_minload: levels must lie in [0, 1]");
  if (!cfg.find(FacilityKind::HeatPump))
    throw BuildError("configuration has no facility spec for HeatPump");
  detail::require_electrolyzer(cfg, electrolyzer);

  std::vector<detail::Job> jobs;
  jobs.push_back({cfg, ModelKind::GreenHydrogen});
  for (double l : levels) {
    SystemConfig c = cfg;
    c.find(FacilityKind::HeatPump)->min_load_fraction = l;
    jobs.push_back({c, ModelKind::DirectAirCapture});
    jobs.push_back({c, ModelKind::Coupled});
  }
  auto runs = detail::run_jobs(jobs, scen, electrolyzer, opts);

  SweepResult res;
  res.sweep = "hp-minload";
  res.axis_label = "heat_pump_min_load";
  res.electrolyzer = electrolyzer;
  res.baseline = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    SweepPoint p;
    p.axis_value = levels[i];
    p.label = short_number(levels[i] * 100.0) + "%";
    p.runs = {runs[0], std::move(runs[1 + 2 * i]), std::move(runs[2 + 2 * i])};
    detail::finish_point(p);
    res.points.push_back(std::move(p));
  }
  const auto& base = res.points.front();
  for (auto& p : res.points) {
    const auto db = base.tac(ModelKind::DirectAirCapture), dp = p.tac(ModelKind::DirectAirCapture);
    const auto cb = base.tac(ModelKind::Coupled), cp = p.tac(ModelKind::Coupled);
    if (db && dp && *db > 0.0) p.tac_ratio_dac = *dp / *db;
    if (cb && cp && *cb > 0.0) p.tac_ratio_coupled = *cp / *cb;
  }
  return res;
}

/// Coupled model under DcOnly, AcOnly and Hybrid; the cheapest feasible mode
/// is flagged (first one on ties).
inline SweepResult compare_bus_modes(const SystemConfig& cfg, const ScenarioSet& scen,
                                     FacilityKind electrolyzer,
                                     const ExperimentOptions& opts = {}) {
  detail::require_electrolyzer(cfg, electrolyzer);
  const std::vector<BusMode> modes{BusMode::DcOnly, BusMode::AcOnly, BusMode::Hybrid};
  std::vector<detail::Job> jobs;
  for (auto m : modes) {
    SystemConfig c = cfg;
    c.bus_mode = m;
    jobs.push_back({c, ModelKind::Coupled});
  }
  auto runs = detail::run_jobs(jobs, scen, electrolyzer, opts);

  SweepResult res;
  res.sweep = "compare-bus";
  res.axis_label = "bus_mode";
  res.electrolyzer = electrolyzer;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    SweepPoint p;
    p.axis_value = static_cast<double>(i);
    p.label = std::string(to_string(modes[i]));
    p.runs.push_back(std::move(runs[i]));
    detail::finish_point(p);
    const auto t = p.tac(ModelKind::Coupled);
    if (t && (!best || *t < *res.points[*best].tac(ModelKind::Coupled))) best = i;
    res.points.push_back(std::move(p));
  }
  if (best) res.points[*best].argmin = true;
  return res;
}

}  // namespace h2dac
