// Copyright 2026 The DDPPM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "ddppm/serialization.h"

#include <gtest/gtest.h>

#include <limits>

#include "test_util.h"

namespace ddppm {
namespace {

TEST(JsonNumber, NonFiniteBecomesNull) {
  EXPECT_TRUE(JsonNumber(std::numeric_limits<double>::infinity()).is_null());
  EXPECT_TRUE(JsonNumber(std::nan("")).is_null());
  EXPECT_EQ(JsonNumber(1.5).get<double>(), 1.5);
}

TEST(ToJson, DoublesRoundTripExactly) {
  double x = 0.1 + 0.2;
  nlohmann::ordered_json j = JsonNumber(x);
  EXPECT_EQ(nlohmann::ordered_json::parse(j.dump()).get<double>(), x);
}

TEST(ToJson, MixingDiagnostics) {
  auto j = ToJson(network::ValidateMixingMatrix(Matrix::Identity(2, 2)));
  EXPECT_FALSE(j["valid"].get<bool>());
  EXPECT_FALSE(j["connected"].get<bool>());
  EXPECT_EQ(j["failures"][0], "connected");
  auto bad = ToJson(network::ValidateMixingMatrix(Matrix::Ones(2, 3)));
  EXPECT_TRUE(bad["lambda2"].is_null());
}

TEST(ToJson, RunResultWithErrorsAndTrace) {
  data::PartitionedDataset p = testing::RandomPartition({3, 3}, 2, 1);
  network::Topology top(network::RingMatrix(2, 0.5), 3);
  engine::RunConfig cfg;
  cfg.iterations = 2;
  cfg.alpha = 0.5;
  cfg.sigma_q = 1.0;
  cfg.sigma_p = {0.1, 0.1, 0.5};
  cfg.record_trace = true;
  engine::RunResult r = engine::RunDdppm(p, top, cfg);
  auto j = ToJson(r, engine::ExactEigenvectors(p.Stack(), 1));
  EXPECT_EQ(j["u_hat"].size(), 1u);
  EXPECT_EQ(j["u_hat"][0].size(), 6u);
  EXPECT_EQ(j["sin_errors"].size(), 1u);
  EXPECT_EQ(j["iterate_norms"][0].size(), 3u);
  EXPECT_EQ(j["trace"][0]["iterations"].size(), 2u);
  EXPECT_EQ(j["trace"][0]["iterations"][0]["z"].size(), 2u);
  EXPECT_EQ(j["trace"][0]["q_final"].size(), 6u);
  auto no_exact = ToJson(r, Matrix());
  EXPECT_FALSE(no_exact.contains("sin_errors"));
  auto c = ToJson(cfg);
  // Only the first `iterations` schedule entries are echoed.
  EXPECT_EQ(c["sigma_p"].size(), 2u);
}

TEST(ToJson, PrivacyReportSchema) {
  privacy::PrivacyReport rep;
  rep.epsilon = 2;
  rep.delta = 0.1;
  rep.per_observer.push_back({0, 0.1, 3.0, "a1:r0:+row", 4, false});
  rep.per_observer.push_back({1, 0.05, 2.0, "a0:r1:-row", 3, false});
  rep.composition = "single-round";
  auto j = ToJson(rep);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys.front(), "epsilon");
  ASSERT_EQ(j["per_observer"].size(), 2u);
  EXPECT_EQ(j["per_observer"][0]["perturbation_id"], "a1:r0:+row");
  EXPECT_EQ(j["per_observer"][1]["beta_star"].get<double>(), 2.0);
}

TEST(ToJson, BoundReportKeepsInfinityAsNull) {
  analysis::BoundReport r;
  r.total = std::numeric_limits<double>::infinity();
  r.vacuous = true;
  auto j = ToJson(r);
  EXPECT_TRUE(j["total"].is_null());
  EXPECT_TRUE(j["vacuous"].get<bool>());
  EXPECT_TRUE(j.contains("checks"));
  EXPECT_TRUE(j["checks"].contains("consensus_within_eigengap"));
}

}  // namespace
}  // namespace ddppm
