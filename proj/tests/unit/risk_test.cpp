// Copyright 2026 The GridAudit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "builders.hpp"
#include "gridaudit/error.hpp"
#include "gridaudit/risk.hpp"
#include "oracles.hpp"

namespace gridaudit {
namespace {

using testing::at;
using testing::book;
using testing::f;
using testing::num;

// Reference values computed once with 50-digit arithmetic and frozen here.
constexpr double kAny002x100 = 0.8673804441052468;
constexpr double kChain002x50 = 0.3641696800871171;
constexpr double kAny0052x150 = 0.9996679139743032;
constexpr double kMaterial002x015x50 = 0.1394860491893331;

TEST(RiskParams, Defaults) {
  const RiskParams p;
  EXPECT_EQ(p.p, 0.02);
  EXPECT_EQ(p.p_audit, 0.052);
  EXPECT_EQ(p.serious_fraction, 0.15);
  EXPECT_EQ(p.materiality, 0.05);
  EXPECT_EQ(p.yield_table.at(1), 0.63);
  EXPECT_EQ(p.yield_table.at(3), 0.83);
  EXPECT_EQ(p.generic_yield, 0.60);
  EXPECT_EQ(p.residual_band_low, 0.001);
  EXPECT_EQ(p.residual_band_high, 0.003);
  EXPECT_EQ(p.complexity_cap, 4);
  EXPECT_NO_THROW(p.validate());
  RiskParams bad;
  bad.p = 1.5;
  EXPECT_THROW(bad.validate(), Error);
  bad = RiskParams{};
  bad.yield_table = {{1, 0.9}, {3, 0.8}};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(ClosedForms, FrozenValues) {
  EXPECT_DOUBLE_EQ(expected_errors(0.02, 1, 1000), 20);
  EXPECT_NEAR(p_any_error(0.02, 100), kAny002x100, 1e-15);
  EXPECT_NEAR(p_any_error(0.02, 100), 0.8674, 1e-4);
  EXPECT_NEAR(p_chain_correct(0.02, 50), kChain002x50, 1e-15);
  EXPECT_NEAR(p_chain_correct(0.02, 50), 0.3642, 1e-4);
  EXPECT_NEAR(p_any_error(0.052, 150), kAny0052x150, 1e-15);
  EXPECT_NEAR(p_material(0.02, 0.15, 50), kMaterial002x015x50, 1e-15);
  EXPECT_EQ(p_any_error(0.02, 0), 0);
  EXPECT_EQ(p_chain_correct(0.02, 0), 1);
}

TEST(ClosedForms, AgreeWithSummationOracle) {
  for (double p : {0.001, 0.01, 0.02, 0.052, 0.2}) {
    for (int n : {1, 2, 10, 57, 100, 1000}) {
      EXPECT_NEAR(p_any_error(p, n), oracle::binomial_at_least_one(p, n), 1e-12) << p << " " << n;
      EXPECT_NEAR(p_chain_correct(p, n), oracle::survival_product(p, n), 1e-12);
      EXPECT_NEAR(p_material(p, 0.15, n), oracle::binomial_at_least_one(p * 0.15, n), 1e-12);
    }
  }
}

TEST(ClosedForms, AuditedRateCrossesThreshold) {
  EXPECT_LT(p_any_error(0.052, 52), 0.94);
  EXPECT_GE(p_any_error(0.052, 53), 0.94);
  for (int u = 57; u <= 100000; ++u) ASSERT_GE(p_any_error(0.052, u), 0.94) << u;
}

TEST(DetectionYield, TableInterpolationAndClamp) {
  EXPECT_DOUBLE_EQ(detection_yield(1), 0.63);
  EXPECT_DOUBLE_EQ(detection_yield(2), 0.73);
  EXPECT_DOUBLE_EQ(detection_yield(3), 0.83);
  EXPECT_DOUBLE_EQ(detection_yield(7), 0.83);
  try {
    detection_yield(0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidTeamSize);
  }
  for (int k = 1; k < 10; ++k) EXPECT_LE(detection_yield(k), detection_yield(k + 1));
}

TEST(Residuals, Trajectories) {
  const auto r = residual_with_yield(20, 0.60, 3);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], 8.0, 1e-12);
  EXPECT_NEAR(r[1], 3.2, 1e-12);
  EXPECT_NEAR(r[2], 1.28, 1e-12);
  const auto one = residual_after_inspection(20, 1, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0], 7.4, 1e-12);
  EXPECT_TRUE(residual_after_inspection(20, 3, 0).empty());
}

TEST(Residuals, BandReachedAfterThreeGenericRounds) {
  for (double u : {1.0, 10.0, 150.0, 2182.0, 1e6}) {
    const auto r = residual_with_yield(0.02 * u, 0.60, 3);
    EXPECT_NEAR(r[2] / u, 0.00128, 1e-15);
    EXPECT_GE(r[2] / u, 0.001);
    EXPECT_LE(r[2] / u, 0.003);
    EXPECT_GT(r[1] / u, 0.003);
  }
  EXPECT_NEAR(1 - std::pow(0.4, 3), 0.936, 1e-15);
  EXPECT_EQ(rounds_to_band(0.02, 0.60), 3);
  EXPECT_EQ(rounds_to_band(0.02, 0.83), 2);
}

TEST(ComplexityMultiplier, ClampedRatio) {
  EXPECT_EQ(complexity_multiplier(0), 1);
  EXPECT_EQ(complexity_multiplier(6), 1);
  EXPECT_EQ(complexity_multiplier(12), 2);
  EXPECT_EQ(complexity_multiplier(100), 4);
}

TEST(RiskScore, Examples) {
  EXPECT_DOUBLE_EQ(risk_score({}), 3);
  EXPECT_DOUBLE_EQ(risk_score({999, 0, 0, 0, 0}), 33);
  const double a = risk_score({100, 0, 0, 0, 0});
  const double b = risk_score({200, 0, 0, 0, 0});
  EXPECT_NEAR(b - a, 10 * std::log10(201.0 / 101.0), 1e-12);
  EXPECT_NEAR(b - a, 2.9887, 1e-4);
  EXPECT_DOUBLE_EQ(risk_score({0, 0, 0, 0, 3}) - risk_score({}), 5);
}

TEST(RiskScore, SizeTermDominatesFromHundredFormulas) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> tokens(0, 100);
  std::uniform_real_distribution<double> chain(0, 99);
  std::uniform_real_distribution<double> xs(0, 99);
  const ScoreWeights w;
  for (int i = 0; i < 1000; ++i) {
    const double u = 100 + static_cast<double>(rng() % 100000);
    const double size = w.size * std::log10(1 + u);
    const double L = std::min(chain(rng), u);
    EXPECT_GT(size, w.complexity * complexity_multiplier(tokens(rng)));
    EXPECT_GT(size, w.chain * std::log10(1 + L));
    EXPECT_GT(size, w.cross_sheet * std::log10(1 + xs(rng)));
    EXPECT_GT(size, w.fraud);
  }
}

TEST(RiskProperties, Monotone) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> prob(0, 0.3);
  std::uniform_int_distribution<int> count(0, 3000);
  for (int i = 0; i < 2000; ++i) {
    const double p = prob(rng), dp = prob(rng) / 10, s = prob(rng);
    const int u = count(rng), du = count(rng) % 50;
    EXPECT_LE(p_any_error(p, u), p_any_error(p, u + du));
    EXPECT_LE(p_any_error(p, u), p_any_error(std::min(1.0, p + dp), u));
    EXPECT_LE(p_material(p, s, u), p_material(p, s, u + du));
    EXPECT_LE(p_material(p, s, u), p_material(p, std::min(1.0, s + dp), u));
    EXPECT_LE(p_material(p, s, u), p_material(std::min(1.0, p + dp), s, u));
    EXPECT_GE(p_chain_correct(p, u), p_chain_correct(p, u + du));
    for (double v : {p_any_error(p, u), p_chain_correct(p, u), p_material(p, s, u)}) {
      EXPECT_GE(v, 0);
      EXPECT_LE(v, 1);
    }
  }
}

TEST(Assess, ReportFieldsFollowInvariants) {
  Workbook wb = book({}, {}, "Model");
  for (int r = 1; r <= 10; ++r) {
    wb.sheets[0].cells[{r, 1}] = num(r);
    wb.sheets[0].cells[{r, 2}] = f("=A" + std::to_string(r) + "*2");
  }
  wb.sheets[0].cells[{11, 2}] = f("=SUM(B1:B10)");
  wb.sheets[0].cells[{12, 2}] = f("=B11*1.1");
  wb.meta.outputs = {at("B12", "Model")};
  const RiskReport rep = assess(wb);
  EXPECT_EQ(rep.unique_formulas, 3u);
  EXPECT_EQ(rep.multiplier, 1);
  EXPECT_DOUBLE_EQ(rep.expected_errors, 0.02 * 3);
  EXPECT_DOUBLE_EQ(rep.p_any_error, 1 - std::pow(0.98, 3));
  ASSERT_EQ(rep.per_output.size(), 1u);
  EXPECT_EQ(rep.per_output[0].chain_length, 12u);
  EXPECT_DOUBLE_EQ(rep.per_output[0].p_chain_correct, std::pow(0.98, 12));
  EXPECT_DOUBLE_EQ(rep.per_output[0].p_material, 1 - std::pow(1 - 0.02 * 0.15, 12));
  EXPECT_DOUBLE_EQ(rep.detection_yield, 0.83);
  ASSERT_EQ(rep.residual_after_rounds.size(), 3u);
  EXPECT_DOUBLE_EQ(rep.residual_after_rounds[0], rep.expected_errors * (1 - 0.83));
  EXPECT_DOUBLE_EQ(rep.risk_score, risk_score({3, rep.mean_tokens, 12, 0, 0}));
}

TEST(Assess, NoOutputsWarns) {
  const RiskReport rep = assess(book({{"A1", f("=1+1")}}));
  EXPECT_TRUE(rep.per_output.empty());
  EXPECT_FALSE(rep.warnings.empty());
  EXPECT_EQ(assess(book({})).unique_formulas, 0u);
  EXPECT_EQ(assess(book({})).p_any_error, 0);
}

TEST(Assess, MultiplierScalesRates) {
  // 24-token formula: multiplier 4
  const auto wb = book({{"A1", f("=B1+B2+B3+B4+B5+B6+B7+B8+B9+B10+B11+B12")}}, {"A1"});
  const RiskReport rep = assess(wb);
  EXPECT_EQ(rep.mean_tokens, 23);
  EXPECT_DOUBLE_EQ(rep.multiplier, 23.0 / 6);
  EXPECT_DOUBLE_EQ(rep.expected_errors, 0.02 * 23.0 / 6);
}

}  // namespace
}  // namespace gridaudit
