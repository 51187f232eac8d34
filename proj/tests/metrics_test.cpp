#include <gtest/gtest.h>

#include <random>

#include "h2dac/metrics.hpp"

namespace h2dac {
namespace {

TEST(Improvement, ReferenceFixtures) {
  EXPECT_NEAR(improvement(34.55, 84.29, 112.22), 6.62, 1e-9);
  EXPECT_NEAR(improvement(41.59, 84.29, 119.43), 6.45, 1e-9);
  EXPECT_EQ(improvement(3.0, 4.0, 7.0), 0.0);
}

TEST(Synergy, ReferenceFixturesWithinRounding) {
  EXPECT_NEAR(synergy(34.55, 84.29, 112.22), 0.0556, 0.0003);
  EXPECT_NEAR(synergy(41.59, 84.29, 119.43), 0.0511, 0.0003);
  EXPECT_EQ(synergy(3.0, 4.0, 7.0), 0.0);
  EXPECT_THROW(synergy(0.0, 0.0, 1.0), DomainError);
}

TEST(Synergy, IsImprovementOverStandaloneSum) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 200.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    EXPECT_EQ(synergy(a, b, c), improvement(a, b, c) / (a + b));
    EXPECT_NEAR(synergy(a, b, c), 1.0 - c / (a + b), 1e-12);
  }
}

TEST(Lcoh, Fixtures) {
  EXPECT_NEAR(lcoh(34.55, 1e4), 3.455, 1e-12);
  EXPECT_NEAR(lcoh(41.59, 1e4), 4.159, 1e-12);
  EXPECT_EQ(lcoh(0.0, 1e4), 0.0);
  EXPECT_THROW(lcoh(1.0, 0.0), DomainError);
  EXPECT_THROW(lcoh(1.0, -3.0), DomainError);
}

TEST(Lcod, Fixtures) {
  EXPECT_NEAR(lcod(84.29, 1e6), 84.29, 1e-12);
  EXPECT_NEAR(lcod(84.29, 5e5), 168.58, 1e-12);
  EXPECT_EQ(lcod(0.0, 1e6), 0.0);
  EXPECT_THROW(lcod(1.0, 0.0), DomainError);
}

TEST(LevelizedCosts, Homogeneous) {
  for (double k : {0.5, 2.0, 3.0, 10.0}) {
    EXPECT_NEAR(lcoh(k * 34.55, 1e4), k * lcoh(34.55, 1e4), 1e-12 * k);
    EXPECT_NEAR(lcod(k * 84.29, 1e6), k * lcod(84.29, 1e6), 1e-12 * k);
  }
}

TEST(CapacityFactor, ConstantSeries) {
  EXPECT_DOUBLE_EQ(capacity_factor(std::vector<double>(24, 5.0), 5.0), 1.0);
  EXPECT_DOUBLE_EQ(capacity_factor(std::vector<double>(24, 2.5), 5.0), 0.5);
  EXPECT_THROW(capacity_factor(std::vector<double>(24, 1.0), 0.0), DomainError);
}

TEST(CapacityFactor, MatchesDirectSummation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  const int S = 3, H = 168;
  const double cap = 40.0;
  const std::vector<double> p = {0.2, 0.3, 0.5};
  std::vector<std::vector<double>> d(S, std::vector<double>(H));
  for (auto& row : d)
    for (auto& v : row) v = u(rng);
  // Oracle: probability-weighted average utilization per hour.
  double oracle = 0.0;
  for (int s = 0; s < S; ++s) {
    double util = 0.0;
    for (int t = 0; t < H; ++t) util += d[s][t] / cap;
    oracle += p[s] * util / H;
  }
  EXPECT_NEAR(capacity_factor(d, p, cap, 8760.0 / H), oracle, 1e-14);
  EXPECT_THROW(capacity_factor(d, {1.0}, cap, 1.0), InvalidParameter);
}

DesignResult design_from_costs(ModelKind model, const std::vector<std::pair<FacilitySpec, double>>& costs,
                               double r) {
  DesignResult d;
  d.model = model;
  for (const auto& [spec, cost] : costs) {
    const double cap = cost / unit_annual_cost(spec, r);
    d.facilities.push_back({spec.kind, cap, annualized_cost(spec, cap, r)});
    d.total_tac += d.facilities.back().annual_cost;
  }
  return d;
}

// Reference cost entries; capacities are backed out of the standalone GH row.
TEST(TacBreakdown, StandaloneGhRow) {
  const double r = 0.07;
  const FacilitySpec wind{FacilityKind::WindTurbine, 0.95, 30, 0.024, 0.0};
  const FacilitySpec pv{FacilityKind::PvPanel, 0.6, 35, 0.02, 0.0};
  const FacilitySpec batt{FacilityKind::Battery, 0.161, 10, 0.025, 0.0};
  const FacilitySpec pem{FacilityKind::PemElectrolyzer, 0.44, 10, 0.02, 0.05};
  const FacilitySpec fc{FacilityKind::FuelCell, 0.96, 5, 0.02, 0.0};
  const FacilitySpec tank{FacilityKind::H2Tank, 0.25, 25, 0.01, 0.0};
  const auto d = design_from_costs(ModelKind::GreenHydrogen,
                                   {{wind, 12.00}, {pv, 6.85}, {batt, 3.26}, {pem, 9.31},
                                    {fc, 0.01}, {tank, 3.12}},
                                   r);
  const auto b = tac_breakdown(d);
  EXPECT_NEAR(b.group(CostGroup::PowerSources), 18.85, 1e-9);
  EXPECT_NEAR(b.group(CostGroup::Battery), 3.26, 1e-9);
  EXPECT_NEAR(b.group(CostGroup::Electrolyzer), 9.31, 1e-9);
  EXPECT_NEAR(b.group(CostGroup::FuelCell), 0.01, 1e-9);
  EXPECT_NEAR(b.group(CostGroup::H2Tank), 3.12, 1e-9);
  EXPECT_NEAR(b.total, 34.55, 1e-9);
  EXPECT_EQ(b.group(CostGroup::Dac), 0.0);
}

TEST(TacBreakdown, GroupsSumToTotal) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    DesignResult d;
    for (auto k : kAllFacilityKinds) {
      const double c = u(rng);
      d.facilities.push_back({k, c, c});
      d.total_tac += c;
    }
    const auto b = tac_breakdown(d);
    double sum = 0.0;
    for (double g : b.groups) sum += g;
    EXPECT_NEAR(sum, b.total, 1e-9 * b.total);
    EXPECT_NEAR(b.total, d.total_tac, 1e-9 * b.total);
  }
}

TEST(TacBreakdown, ZeroDesign) {
  DesignResult d;
  for (auto k : kAllFacilityKinds) d.facilities.push_back({k, 0.0, 0.0});
  const auto b = tac_breakdown(d);
  for (double g : b.groups) EXPECT_EQ(g, 0.0);
  EXPECT_EQ(b.total, 0.0);
}

TEST(GroupSynergy, UndefinedWhereCoupledIsZero) {
  EXPECT_FALSE(group_synergy(0.01, 0.0, 0.0));
  EXPECT_FALSE(group_synergy(0.0, 0.0, 1.0));
  EXPECT_NEAR(*group_synergy(10.0, 10.0, 15.0), 0.25, 1e-15);
}

TEST(GroupOf, PowerSourcesAreWindAndPv) {
  EXPECT_EQ(group_of(FacilityKind::WindTurbine), CostGroup::PowerSources);
  EXPECT_EQ(group_of(FacilityKind::PvPanel), CostGroup::PowerSources);
  EXPECT_EQ(group_of(FacilityKind::AlkalineElectrolyzer), CostGroup::Electrolyzer);
  EXPECT_EQ(column_key(CostGroup::H2Tank), "h2_tank");
  EXPECT_EQ(display_name(CostGroup::PowerSources), "Power Sources");
}

TEST(CompareDesigns, ReportsEverything) {
  const double r = 0.07;
  const FacilitySpec wind{FacilityKind::WindTurbine, 0.95, 30, 0.024, 0.0};
  const FacilitySpec pem{FacilityKind::PemElectrolyzer, 0.44, 10, 0.02, 0.05};
  const FacilitySpec dacp{FacilityKind::DacPlant, 2.76, 30, 0.04, 0.0};
  auto gh = design_from_costs(ModelKind::GreenHydrogen, {{wind, 20.0}, {pem, 14.55}}, r);
  gh.annual_h2 = 1e4;
  auto dac = design_from_costs(ModelKind::DirectAirCapture, {{wind, 30.0}, {dacp, 54.29}}, r);
  dac.probabilities = {1.0};
  dac.annual_co2 = {1e6};
  const auto co = design_from_costs(ModelKind::Coupled, {{wind, 45.0}, {pem, 14.55}, {dacp, 52.67}}, r);
  const auto rep = compare_designs(gh, dac, co);
  EXPECT_NEAR(*rep.lcoh, 3.455, 1e-9);
  EXPECT_NEAR(*rep.lcod, 84.29, 1e-9);
  EXPECT_NEAR(rep.improvement, 6.62, 1e-9);
  EXPECT_EQ(*rep.synergy, synergy(gh.total_tac, dac.total_tac, co.total_tac));
  EXPECT_NEAR(*rep.group_synergy[static_cast<int>(CostGroup::PowerSources)], 1.0 - 45.0 / 50.0, 1e-12);
  EXPECT_FALSE(rep.group_synergy[static_cast<int>(CostGroup::FuelCell)]);
}

}  // namespace
}  // namespace h2dac
