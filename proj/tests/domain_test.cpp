#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "h2dac/domain.hpp"
#include "test_config.hpp"

namespace h2dac {
namespace {

// Direct evaluation of r(1+r)^L / ((1+r)^L - 1) in extended precision.
long double crf_oracle(long double r, int L) {
  const long double g = std::pow(1.0L + r, static_cast<long double>(L));
  return r * g / (g - 1.0L);
}

TEST(Crf, MatchesClosedForm) {
  EXPECT_NEAR(crf(0.07, 30), 0.080586, 5e-7);
  EXPECT_NEAR(crf(0.07, 10), 0.142378, 5e-7);
  for (double r : {0.01, 0.05, 0.07, 0.12, 0.5})
    for (int L : {1, 5, 10, 25, 35, 60})
      EXPECT_NEAR(crf(r, L), static_cast<double>(crf_oracle(r, L)), 1e-14) << r << " " << L;
}

TEST(Crf, ZeroRateIsOneOverLifetime) {
  EXPECT_DOUBLE_EQ(crf(0.0, 20), 0.05);
  EXPECT_DOUBLE_EQ(crf(0.0, 1), 1.0);
  // Continuous at r -> 0.
  EXPECT_NEAR(crf(1e-12, 20), 0.05, 1e-12);
}

TEST(Crf, RejectsOutOfDomain) {
  EXPECT_THROW(crf(0.07, 0), InvalidParameter);
  EXPECT_THROW(crf(-0.01, 10), InvalidParameter);
  EXPECT_THROW(crf(1.0, 10), InvalidParameter);
  EXPECT_THROW(crf(std::nan(""), 10), InvalidParameter);
}

TEST(Crf, MonotoneInRateAndLifetime) {
  for (int L = 1; L <= 60; ++L) {
    double prev = crf(0.0, L);
    for (int k = 1; k < 100; ++k) {
      const double v = crf(k * 0.0099, L);
      EXPECT_GT(v, prev) << "L=" << L << " r=" << k * 0.0099;
      prev = v;
    }
  }
  // Above r ~ 0.3 crf(r, 60) equals r to the last bit, so the lifetime scan stays below.
  for (int k = 1; k <= 100; ++k) {
    const double r = k * 0.003;
    double prev = crf(r, 1);
    for (int L = 2; L <= 60; ++L) {
      const double v = crf(r, L);
      EXPECT_LT(v, prev) << "r=" << r << " L=" << L;
      prev = v;
    }
  }
}

TEST(Crf, ApproachesRateForLongLifetimes) { EXPECT_LT(std::abs(crf(0.07, 500) - 0.07), 1e-9); }

TEST(AnnualizedCost, ReferenceCostExamples) {
  const FacilitySpec wind{FacilityKind::WindTurbine, 0.95, 30, 0.024, 0.0};
  EXPECT_NEAR(annualized_cost(wind, 100.0, 0.07), 9.9357, 5e-5);
  const FacilitySpec pv{FacilityKind::PvPanel, 0.6, 35, 0.02, 0.0};
  EXPECT_NEAR(annualized_cost(pv, 10.0, 0.07), 0.58340, 5e-6);
  EXPECT_EQ(annualized_cost(pv, 0.0, 0.07), 0.0);
}

TEST(AnnualizedCost, LinearInCapacity) {
  const FacilitySpec dac{FacilityKind::DacPlant, 2.76, 30, 0.04, 0.0};
  for (double x : {0.1, 1.0, 3.7, 125.0, 1e6})
    EXPECT_EQ(annualized_cost(dac, 2.0 * x, 0.07), 2.0 * annualized_cost(dac, x, 0.07));
}

TEST(AnnualizedCost, RejectsNegativeCapacity) {
  const FacilitySpec pv{FacilityKind::PvPanel, 0.6, 35, 0.02, 0.0};
  EXPECT_THROW(annualized_cost(pv, -1.0, 0.07), InvalidParameter);
}

nlohmann::json example_json() {
  std::ifstream in(testing::example_config_path());
  return nlohmann::json::parse(in);
}

std::string validation_key(const nlohmann::json& doc) {
  try {
    config_from_json(doc);
  } catch (const ValidationError& e) {
    return e.key();
  }
  return "";
}

TEST(ValidateConfig, ExampleLoads) {
  const auto cfg = testing::example_config();
  EXPECT_EQ(cfg.facilities.size(), 10u);
  EXPECT_DOUBLE_EQ(cfg.economics.discount_rate, 0.07);
  EXPECT_DOUBLE_EQ(cfg.h2_demand, 1e4);
  EXPECT_DOUBLE_EQ(cfg.co2_target, 1e6);
  EXPECT_EQ(cfg.bus_mode, BusMode::Hybrid);
}

TEST(ValidateConfig, MinLoadAboveOneNamesTheKey) {
  auto doc = example_json();
  doc["facilities"][3]["min_load_fraction"] = 1.2;
  EXPECT_NE(validation_key(doc).find("min_load_fraction"), std::string::npos);
}

TEST(ValidateConfig, MissingConverterBlockGetsDefaults) {
  auto doc = example_json();
  doc.erase("converters");
  const auto cfg = config_from_json(doc);
  EXPECT_DOUBLE_EQ(cfg.converters.dc_dc, 0.98);
  EXPECT_DOUBLE_EQ(cfg.converters.ac_ac, 0.98);
  EXPECT_DOUBLE_EQ(cfg.converters.ac_dc, 0.95);
}

TEST(ValidateConfig, DefaultsFilled) {
  auto doc = example_json();
  doc["intensities"].erase("battery_duration_h");
  doc.erase("co2_enforcement");
  const auto cfg = config_from_json(doc);
  EXPECT_DOUBLE_EQ(cfg.intensities.battery_duration_h, 8.0);
  EXPECT_EQ(cfg.co2_enforcement, Co2Enforcement::PerScenario);
}

TEST(ValidateConfig, Idempotent) {
  const auto once = testing::example_config();
  EXPECT_EQ(validate_config(once), once);
  EXPECT_EQ(validate_config(validate_config(once)), once);
}

TEST(ValidateConfig, JsonRoundTrip) {
  const auto cfg = testing::example_config();
  EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg);
}

TEST(ValidateConfig, RejectsBadInputs) {
  {
    auto doc = example_json();
    doc["facilities"].push_back(doc["facilities"][0]);
    EXPECT_EQ(validation_key(doc), "facilities");
  }
  {
    auto doc = example_json();
    doc["economics"].erase("discount_rate");
    EXPECT_EQ(validation_key(doc), "economics.discount_rate");
  }
  {
    auto doc = example_json();
    doc["intensities"].erase("heat_pump_cop");
    EXPECT_EQ(validation_key(doc), "intensities.heat_pump_cop");
  }
  {
    auto doc = example_json();
    doc["intensities"]["heat_pump_cop"] = 0.8;
    EXPECT_EQ(validation_key(doc), "intensities.heat_pump_cop");
  }
  {
    auto doc = example_json();
    doc["intensities"]["battery_charge_eff"] = 1.1;
    EXPECT_EQ(validation_key(doc), "intensities.battery_charge_eff");
  }
  {
    auto doc = example_json();
    doc["converters"]["ac_dc"] = 0.0;
    EXPECT_EQ(validation_key(doc), "converters.ac_dc");
  }
  {
    auto doc = example_json();
    doc["facilities"][0]["lifetime"] = 0;
    EXPECT_EQ(validation_key(doc), "facilities[WindTurbine].lifetime");
  }
  {
    auto doc = example_json();
    doc["facilities"][0]["om_fraction"] = -0.1;
    EXPECT_EQ(validation_key(doc), "facilities[WindTurbine].om_fraction");
  }
  {
    auto doc = example_json();
    doc["facilities"][0]["investment_cost"] = -1.0;
    EXPECT_EQ(validation_key(doc), "facilities[WindTurbine].investment_cost");
  }
  {
    auto doc = example_json();
    doc["demand"]["h2_t_per_yr"] = -5.0;
    EXPECT_EQ(validation_key(doc), "demand.h2_t_per_yr");
  }
  {
    auto doc = example_json();
    doc["economics"]["discount_rate"] = 1.0;
    EXPECT_EQ(validation_key(doc), "economics.discount_rate");
  }
}

TEST(ValidateConfig, UnknownKeysAreErrors) {
  {
    auto doc = example_json();
    doc["bus_mod"] = "Hybrid";
    EXPECT_EQ(validation_key(doc), "bus_mod");
  }
  {
    auto doc = example_json();
    doc["intensities"]["cop"] = 3.0;
    EXPECT_EQ(validation_key(doc), "intensities.cop");
  }
  {
    auto doc = example_json();
    doc["facilities"][2]["capacity"] = 3.0;
    EXPECT_EQ(validation_key(doc), "facilities[].capacity");
  }
}

TEST(ValidateConfig, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

TEST(FacilityKind, NamesRoundTrip) {
  for (auto k : kAllFacilityKinds) EXPECT_EQ(facility_kind_from_string(to_string(k)), k);
  EXPECT_FALSE(facility_kind_from_string("Nuclear"));
}

}  // namespace
}  // namespace h2dac
