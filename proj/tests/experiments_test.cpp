#include <gtest/gtest.h>

#include <algorithm>

#include "h2dac/experiments.hpp"
#include "test_config.hpp"

namespace h2dac {
namespace {

constexpr auto kPem = FacilityKind::PemElectrolyzer;

const ScenarioSet& weather() {
  static const ScenarioSet s = synthesize_weather(3, 48, 2);
  return s;
}

TEST(MolarRatio, TwoHundredKtAgainstTenKt) {
  const double oracle = (2e5 / 44.01) / (1e4 / 2.016);
  EXPECT_DOUBLE_EQ(co2_h2_molar_ratio(2e5, 1e4), oracle);
  EXPECT_NEAR(co2_h2_molar_ratio(2e5, 1e4), 0.9162, 5e-5);
}

TEST(DefaultAxes, RemovalAndHeatPump) {
  const auto r = default_removal_rates();
  ASSERT_EQ(r.size(), 7u);
  EXPECT_DOUBLE_EQ(r.front(), 1e5);
  EXPECT_DOUBLE_EQ(r.back(), 1.3e6);
  EXPECT_EQ(default_hp_levels(), (std::vector<double>{0.40, 0.30, 0.20, 0.10}));
}

TEST(RemovalSweep, SevenMonotonePointsWithNonNegativeSynergy) {
  const auto cfg = testing::example_config();
  const auto res = sweep_removal_rate(cfg, weather(), kPem, default_removal_rates());
  ASSERT_EQ(res.points.size(), 7u);
  EXPECT_EQ(res.points[0].label, "0.1 Mt");
  EXPECT_EQ(res.points[6].label, "1.3 Mt");
  EXPECT_NEAR(*res.points[0].molar_ratio, 0.9162 / 2.0, 5e-5);
  double prev_dac = 0.0, prev_cp = 0.0;
  for (const auto& p : res.points) {
    ASSERT_TRUE(p.feasible) << p.label;
    ASSERT_TRUE(p.metrics);
    EXPECT_GE(*p.tac(ModelKind::DirectAirCapture), prev_dac * (1.0 - 1e-9)) << p.label;
    EXPECT_GE(*p.tac(ModelKind::Coupled), prev_cp * (1.0 - 1e-9)) << p.label;
    prev_dac = *p.tac(ModelKind::DirectAirCapture);
    prev_cp = *p.tac(ModelKind::Coupled);
    EXPECT_GE(*p.metrics->synergy, -1e-6) << p.label;
    for (const auto& r : p.runs) EXPECT_LE(r.audit_violation, 1e-7);
  }
  // GH is shared across points.
  EXPECT_EQ(res.points[0].tac(ModelKind::GreenHydrogen), res.points[6].tac(ModelKind::GreenHydrogen));
}

TEST(RemovalSweep, IndependentOfThreadCount) {
  const auto cfg = testing::example_config();
  const std::vector<double> rates = {3e5, 1e5, 5e5};
  ExperimentOptions one, many;
  many.threads = 3;
  const auto a = sweep_removal_rate(cfg, weather(), kPem, rates, one);
  const auto b = sweep_removal_rate(cfg, weather(), kPem, rates, many);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].label, b.points[i].label);
    EXPECT_EQ(a.points[i].metrics, b.points[i].metrics);
    for (std::size_t k = 0; k < a.points[i].runs.size(); ++k)
      EXPECT_EQ(a.points[i].runs[k].design->dispatch, b.points[i].runs[k].design->dispatch);
  }
  // Axis order does not change per-point results.
  const auto c = sweep_removal_rate(cfg, weather(), kPem, {1e5, 3e5, 5e5}, one);
  EXPECT_EQ(a.points[0].metrics, c.points[1].metrics);
  EXPECT_EQ(a.points[1].metrics, c.points[0].metrics);
}

TEST(RemovalSweep, InfeasiblePointsAreFlaggedNotFatal) {
  const auto cfg = testing::example_config();
  const ScenarioSet calm({Scenario{1.0, std::vector<double>(24, 0.0), std::vector<double>(24, 0.0)}});
  const auto res = sweep_removal_rate(cfg, calm, kPem, {0.0, 1e5});
  ASSERT_EQ(res.points.size(), 2u);
  for (const auto& p : res.points) {
    EXPECT_FALSE(p.feasible);
    EXPECT_FALSE(p.metrics);
  }
  EXPECT_EQ(res.points[0].run(ModelKind::DirectAirCapture)->status, SolveStatus::Optimal);
  EXPECT_EQ(res.points[1].run(ModelKind::DirectAirCapture)->status, SolveStatus::Infeasible);
}

TEST(RemovalSweep, RejectsBadInput) {
  const auto cfg = testing::example_config();
  EXPECT_THROW(sweep_removal_rate(cfg, weather(), kPem, {}), InvalidParameter);
  EXPECT_THROW(sweep_removal_rate(cfg, weather(), kPem, {-1.0}), InvalidParameter);
  EXPECT_THROW(sweep_removal_rate(cfg, weather(), FacilityKind::Tes, {1e5}), InvalidParameter);
}

TEST(Sensitivity, SignsFollowTheCostChange) {
  auto cfg = testing::example_config();
  cfg.co2_target = 3e5;
  const auto res = sensitivity_costs(cfg, weather(), kPem, 0.2, all_sensitivity_targets());
  ASSERT_EQ(res.points.size(), 9u);
  EXPECT_EQ(res.points[0].label, "baseline");
  EXPECT_EQ(*res.baseline, 0u);
  EXPECT_EQ(*res.points[0].tac_difference, 0.0);
  EXPECT_EQ(res.points[1].label, "power_sources+20%");
  EXPECT_EQ(res.points[2].label, "power_sources-20%");
  const double base = *res.points[0].tac(ModelKind::Coupled);
  for (std::size_t i = 1; i < res.points.size(); ++i) {
    const auto& p = res.points[i];
    ASSERT_TRUE(p.tac_difference) << p.label;
    if (p.axis_value > 0)
      EXPECT_GE(*p.tac_difference, -1e-9 * base) << p.label;
    else
      EXPECT_LE(*p.tac_difference, 1e-9 * base) << p.label;
    ASSERT_TRUE(p.synergy_difference);
    EXPECT_NEAR(*p.synergy_difference, *p.metrics->synergy - *res.points[0].metrics->synergy, 1e-15);
  }
  EXPECT_THROW(sensitivity_costs(cfg, weather(), kPem, 1.0, all_sensitivity_targets()),
               InvalidParameter);
  EXPECT_THROW(sensitivity_costs(cfg, weather(), kPem, 0.2, {}), InvalidParameter);
}

TEST(Sensitivity, ScaleInvestmentTouchesOnlyTheGroup) {
  const auto cfg = testing::example_config();
  const auto s = scale_investment(cfg, SensitivityTarget::PowerSources, 1.2);
  for (const auto& f : s.facilities) {
    const double orig = cfg.find(f.kind)->investment_cost;
    const bool hit = f.kind == FacilityKind::WindTurbine || f.kind == FacilityKind::PvPanel;
    EXPECT_DOUBLE_EQ(f.investment_cost, hit ? orig * 1.2 : orig);
  }
  for (auto t : all_sensitivity_targets()) EXPECT_EQ(sensitivity_target_from_string(to_string(t)), t);
}

TEST(HeatPumpSweep, RatiosStartAtOneAndDoNotIncrease) {
  const auto cfg = testing::example_config();
  const auto res = sweep_heatpump_minload(cfg, weather(), kPem, default_hp_levels());
  ASSERT_EQ(res.points.size(), 4u);
  EXPECT_EQ(*res.points[0].tac_ratio_dac, 1.0);
  EXPECT_EQ(*res.points[0].tac_ratio_coupled, 1.0);
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_LE(*res.points[i].tac_ratio_dac, *res.points[i - 1].tac_ratio_dac + 1e-9);
    EXPECT_LE(*res.points[i].tac_ratio_coupled, *res.points[i - 1].tac_ratio_coupled + 1e-9);
  }
  // The 40% floor binds on this instance, so the first relaxation helps.
  EXPECT_LT(*res.points[1].tac_ratio_dac, 1.0);
  EXPECT_EQ(res.points[0].label, "40%");
  EXPECT_THROW(sweep_heatpump_minload(cfg, weather(), kPem, {1.5}), InvalidParameter);
}

TEST(BusModes, ArgminFlaggedOnce) {
  const auto cfg = testing::example_config();
  const auto res = compare_bus_modes(cfg, weather(), kPem);
  ASSERT_EQ(res.points.size(), 3u);
  EXPECT_EQ(res.points[0].label, "DcOnly");
  EXPECT_EQ(res.points[2].label, "Hybrid");
  int flagged = 0;
  double best = kInf;
  for (const auto& p : res.points) best = std::min(best, *p.tac(ModelKind::Coupled));
  for (const auto& p : res.points) {
    flagged += p.argmin;
    if (p.argmin) EXPECT_EQ(*p.tac(ModelKind::Coupled), best);
  }
  EXPECT_EQ(flagged, 1);
}

TEST(BusModes, LosslessConvertersMakeTopologiesEquivalent) {
  auto cfg = testing::example_config();
  cfg.converters = {1.0, 1.0, 1.0};
  const auto res = compare_bus_modes(cfg, weather(), kPem);
  const double ref = *res.points[2].tac(ModelKind::Coupled);
  for (const auto& p : res.points) EXPECT_NEAR(*p.tac(ModelKind::Coupled), ref, 1e-6 * ref) << p.label;
}

}  // namespace
}  // namespace h2dac
