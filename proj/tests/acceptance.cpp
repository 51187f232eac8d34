// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "design_checks.hpp"
#include "h2dac/audit.hpp"
#include "h2dac/experiments.hpp"
#include "h2dac/metrics.hpp"
#include "lp_oracle.hpp"
#include "test_config.hpp"

namespace h2dac {
namespace {

using Clock = std::chrono::steady_clock;

constexpr int kDeskHours = 168;
constexpr int kDeskScenarios = 2;
constexpr std::uint64_t kDeskSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Worst residuals over every optimal model solve made by the suite.
struct SolveLedger {
  int solves = 0;
  double row = 0.0, bound = 0.0;
  testing::DispatchViolations dispatch;

  void add(const LpProblem& lp, const SolveResult& r, const DesignResult& d, const SystemConfig& cfg,
           const ScenarioSet& scen) {
    ++solves;
    const auto a = audit_solution(lp, r.primal);
    row = std::max(row, a.max_row_violation);
    bound = std::max(bound, a.max_bound_violation);
    const auto v = testing::check_dispatch(d, cfg, scen);
    dispatch.min_load = std::max(dispatch.min_load, v.min_load);
    dispatch.max_load = std::max(dispatch.max_load, v.max_load);
    dispatch.storage_cycle = std::max(dispatch.storage_cycle, v.storage_cycle);
    dispatch.h2_balance = std::max(dispatch.h2_balance, v.h2_balance);
  }
};

SolveLedger ledger;

/// Builds, solves and audits one model; nullopt unless Optimal.
std::optional<DesignResult> solve_model(const SystemConfig& cfg, const ScenarioSet& scen,
                                        ModelKind kind, FacilityKind el) {
  const auto m = build_model(cfg, scen, kind, el);
  auto r = solve_design(m, cfg, scen);
  if (r.solve.status != SolveStatus::Optimal) return std::nullopt;
  ledger.add(m.lp, r.solve, *r.design, cfg, scen);
  return r.design;
}

// Sweep runs carry their own audit; fold it into the ledger.
void record_sweep(const SweepResult& res) {
  for (const auto& p : res.points)
    for (const auto& run : p.runs)
      if (run.design) {
        ++ledger.solves;
        ledger.row = std::max(ledger.row, run.audit_violation);
      }
}

const ScenarioSet& desk_weather() {
  static const ScenarioSet s = synthesize_weather(kDeskSeed, kDeskHours, kDeskScenarios);
  return s;
}

// ---------------------------------------------------------------------------

Outcome metric_arithmetic() {
  const double i2 = improvement(34.55, 84.29, 112.22), s2 = synergy(34.55, 84.29, 112.22);
  const double i3 = improvement(41.59, 84.29, 119.43), s3 = synergy(41.59, 84.29, 119.43);
  const bool ok = std::abs(i2 - 6.62) < 1e-9 && std::abs(i3 - 6.45) < 1e-9 &&
                  std::abs(s2 - 0.0556) <= 0.0003 && std::abs(s3 - 0.0511) <= 0.0003;
  return {ok, fmt("improvement %.6f / %.6f MM$/yr, synergy %.4f%% / %.4f%%", i2, i3, 100 * s2, 100 * s3)};
}

Outcome levelized_costs() {
  const double pem = lcoh(34.55, 1e4), alk = lcoh(41.59, 1e4), dac = lcod(84.29, 1e6);
  const bool ok = std::abs(pem - 3.455) < 1e-12 && std::abs(alk - 4.159) < 1e-12 &&
                  std::abs(dac - 84.29) < 1e-12 && pem >= 3.2 && pem <= 3.6 && alk >= 3.7 &&
                  alk <= 4.3 && dac >= 80.0 && dac <= 86.0;
  return {ok, fmt("LCOH %.3f $/kg in [3.2,3.6], %.3f $/kg in [3.7,4.3]; LCOD %.2f $/t in [80,86]",
                  pem, alk, dac)};
}

Outcome solver_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240611);
  double worst = 0.0;
  int matched = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = testing::random_bounded_lp(rng);
    const auto oracle = testing::vertex_enumeration_optimum(p);
    const auto r = solve(p.to_lp());
    if (!oracle || r.status != SolveStatus::Optimal) continue;
    const double err = std::abs(r.objective - *oracle) / (1.0 + std::abs(*oracle));
    worst = std::max(worst, err);
    if (err <= 1e-8) ++matched;
  }
  const auto beale = solve(testing::beale_cycling_lp());
  SolveOptions primal;
  primal.algorithm = Algorithm::Primal;
  primal.pricing = Pricing::Dantzig;
  primal.stall_length = 1;
  const auto beale_primal = solve(testing::beale_cycling_lp(), primal);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = matched == 50 && beale.status == SolveStatus::Optimal &&
                  beale_primal.status == SolveStatus::Optimal && secs < 5.0;
  return {ok, fmt("%d/50 random LPs within 1e-8 (worst %.1e); cycling instance %s/%s objective "
                  "%.4f; %.2f s",
                  matched, worst, std::string(to_string(beale.status)).c_str(),
                  std::string(to_string(beale_primal.status)).c_str(), beale.objective, secs)};
}

Outcome synergy_nonnegative() {
  const auto t0 = Clock::now();
  const auto base = testing::example_config();
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> cost(0.7, 1.3), h2(5e3, 2e4), co2(2e5, 1.5e6),
      minload(0.1, 0.4), cop(2.0, 3.5);
  int configs = 0, feasible = 0, violations = 0;
  double worst = kInf;
  for (int i = 0; i < 20; ++i) {
    SystemConfig cfg = base;
    for (auto& f : cfg.facilities) f.investment_cost *= cost(rng);
    cfg.h2_demand = h2(rng);
    cfg.co2_target = co2(rng);
    cfg.find(FacilityKind::HeatPump)->min_load_fraction = minload(rng);
    cfg.intensities.heat_pump_cop = cop(rng);
    const auto el = i % 2 == 0 ? FacilityKind::PemElectrolyzer : FacilityKind::AlkalineElectrolyzer;
    const auto scen = synthesize_weather(100 + i, kDeskHours, kDeskScenarios);
    ++configs;
    const auto gh = solve_model(cfg, scen, ModelKind::GreenHydrogen, el);
    const auto dac = solve_model(cfg, scen, ModelKind::DirectAirCapture, el);
    if (!gh || !dac) continue;
    ++feasible;
    const auto cp = solve_model(cfg, scen, ModelKind::Coupled, el);
    const double sum = gh->total_tac + dac->total_tac;
    if (!cp || cp->total_tac > sum * (1.0 + 1e-6)) {
      ++violations;
      continue;
    }
    worst = std::min(worst, synergy(gh->total_tac, dac->total_tac, cp->total_tac));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = feasible >= 20 && violations == 0 && secs < 600.0;
  return {ok, fmt("%d configs, %d with both standalone models feasible, %d violations; "
                  "min synergy %.4f%%; %.1f s",
                  configs, feasible, violations, 100 * worst, secs)};
}

Outcome monotone_and_homogeneous() {
  const auto cfg = testing::example_config();
  const auto& scen = desk_weather();
  const auto el = FacilityKind::PemElectrolyzer;

  const auto sweep = sweep_removal_rate(cfg, scen, el, default_removal_rates());
  record_sweep(sweep);
  bool monotone = sweep.points.size() == 7;
  double prev = -kInf;
  for (const auto& p : sweep.points) {
    const auto t = p.tac(ModelKind::Coupled), d = p.tac(ModelKind::DirectAirCapture);
    if (!p.feasible || !t || !d) {
      monotone = false;
      break;
    }
    // Coupled TAC along the axis; the DAC column is checked the same way.
    monotone = monotone && *t >= prev * (1.0 - 1e-9);
    prev = *t;
  }
  double prev_dac = -kInf;
  for (const auto& p : sweep.points) {
    const auto d = p.tac(ModelKind::DirectAirCapture);
    if (d) {
      monotone = monotone && *d >= prev_dac * (1.0 - 1e-9);
      prev_dac = *d;
    }
  }

  const auto base = solve_model(cfg, scen, ModelKind::Coupled, el);
  auto twice = cfg;
  twice.h2_demand *= 2.0;
  twice.co2_target *= 2.0;
  const auto doubled = solve_model(twice, scen, ModelKind::Coupled, el);
  auto dear = cfg;
  for (auto& f : dear.facilities) f.investment_cost *= 1.2;
  const auto scaled = solve_model(dear, scen, ModelKind::Coupled, el);
  if (!base || !doubled || !scaled) return {false, "a homogeneity solve was not optimal"};
  const double dbl_err = std::abs(doubled->total_tac / (2.0 * base->total_tac) - 1.0);
  const double cost_err = std::abs(scaled->total_tac / (1.2 * base->total_tac) - 1.0);
  const bool ok = monotone && dbl_err <= 1e-6 && cost_err <= 1e-9;
  return {ok, fmt("removal sweep %s (coupled %.3f -> %.3f MM$/yr); doubling demands rel. error "
                  "%.1e; costs x1.2 rel. error %.1e",
                  monotone ? "nondecreasing" : "NOT monotone",
                  *sweep.points.front().tac(ModelKind::Coupled),
                  *sweep.points.back().tac(ModelKind::Coupled), dbl_err, cost_err)};
}

Outcome heat_pump_flexibility() {
  const auto cfg = testing::example_config();
  const auto res = sweep_heatpump_minload(cfg, desk_weather(), FacilityKind::PemElectrolyzer,
                                          default_hp_levels());
  record_sweep(res);
  bool ok = res.points.size() == 4 && res.points[0].tac_ratio_dac == 1.0 &&
            res.points[0].tac_ratio_coupled == 1.0;
  std::string ratios;
  for (std::size_t i = 0; ok && i < res.points.size(); ++i) {
    const auto& p = res.points[i];
    if (!p.tac_ratio_dac || !p.tac_ratio_coupled) {
      ok = false;
      break;
    }
    if (i > 0)
      ok = ok && *p.tac_ratio_dac <= *res.points[i - 1].tac_ratio_dac + 1e-9 &&
           *p.tac_ratio_coupled <= *res.points[i - 1].tac_ratio_coupled + 1e-9;
    ratios += fmt("%s%s %.4f/%.4f", i ? ", " : "", p.label.c_str(), *p.tac_ratio_dac,
                  *p.tac_ratio_coupled);
  }
  return {ok, "TAC ratio DAC/coupled: " + ratios};
}

Outcome qualitative_orderings() {
  const auto cfg = testing::example_config();
  const auto& scen = desk_weather();
  const auto pem = solve_model(cfg, scen, ModelKind::GreenHydrogen, FacilityKind::PemElectrolyzer);
  const auto alk = solve_model(cfg, scen, ModelKind::GreenHydrogen, FacilityKind::AlkalineElectrolyzer);
  const auto dac = solve_model(cfg, scen, ModelKind::DirectAirCapture, FacilityKind::PemElectrolyzer);
  if (!pem || !alk || !dac) return {false, "a standalone solve was not optimal"};
  const double l_pem = *design_metrics(*pem).lcoh, l_alk = *design_metrics(*alk).lcoh;
  const auto b = tac_breakdown(*dac);
  const auto largest = std::max_element(b.groups.begin(), b.groups.end()) - b.groups.begin();
  const bool ok = l_alk > l_pem && kAllCostGroups[largest] == CostGroup::Dac;
  return {ok, fmt("LCOH alkaline %.3f > PEM %.3f $/kg (+%.1f%%); LCOD %.2f $/t, largest component "
                  "%s (%.1f%% of TAC)",
                  l_alk, l_pem, 100.0 * (l_alk / l_pem - 1.0), *design_metrics(*dac).lcod,
                  std::string(display_name(kAllCostGroups[largest])).c_str(),
                  100.0 * b.groups[largest] / b.total)};
}

Outcome solution_audit() {
  const bool ok = ledger.solves > 0 && ledger.row <= 1e-7 && ledger.bound <= 1e-7 &&
                  ledger.dispatch.min_load <= 1e-7 && ledger.dispatch.storage_cycle <= 1e-7;
  return {ok, fmt("%d optimal solves: max scaled row %.1e, bound %.1e; min-load shortfall %.1e, "
                  "storage cycle residual %.1e",
                  ledger.solves, ledger.row, ledger.bound, ledger.dispatch.min_load,
                  ledger.dispatch.storage_cycle)};
}

Outcome performance() {
  auto cfg = testing::example_config();
  cfg.bus_mode = BusMode::Hybrid;
  const auto t0 = Clock::now();
  const auto scen = synthesize_weather(kDeskSeed, 336, 3);
  const auto m = build_coupled(cfg, scen, FacilityKind::PemElectrolyzer);
  const auto r = solve_design(m, cfg, scen);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (r.solve.status != SolveStatus::Optimal) return {false, "coupled H=336 S=3 solve not optimal"};
  ledger.add(m.lp, r.solve, *r.design, cfg, scen);
  return {secs < 60.0, fmt("coupled Hybrid H=336 S=3: %d columns, %d rows, %ld iterations, "
                           "TAC %.3f MM$/yr, %.1f s",
                           m.lp.n_cols(), m.lp.n_rows(), r.solve.iterations, r.design->total_tac,
                           secs)};
}

Outcome reproducibility_statement(bool substitutes_pass) {
  return {substitutes_pass,
          "headline ~10% coupling benefit, regional LCOH/LCOD values and removal-rate curves "
          "depend on site weather data and intensity parameters that are not available; "
          "criteria 1-8 are the property-based substitute" +
              std::string(substitutes_pass ? " and all pass" : " and at least one fails")};
}

}  // namespace
}  // namespace h2dac

int main() {
  using namespace h2dac;
  int failures = 0;
  bool substitutes = true;
  auto run = [&](int n, const char* name, const std::function<Outcome()>& f) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!o.pass) {
      ++failures;
      if (n <= 8) substitutes = false;
    }
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", n, o.pass ? "PASS" : "FAIL", name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  };
  run(1, "metric arithmetic", metric_arithmetic);
  run(2, "LCOH/LCOD consistency", levelized_costs);
  run(3, "solver oracle equivalence", solver_oracle);
  run(4, "synergy non-negativity", synergy_nonnegative);
  run(5, "monotonicity and homogeneity", monotone_and_homogeneous);
  run(6, "heat-pump flexibility", heat_pump_flexibility);
  run(7, "qualitative orderings", qualitative_orderings);
  run(8, "solution audit", solution_audit);
  run(9, "performance", performance);
  run(10, "non-reproducibility statement", [&] { return reproducibility_statement(substitutes); });
  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
