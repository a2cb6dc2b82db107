/*
 * Copyright 2026 The evdet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "evdet/errors.hpp"
#include "evdet/evaluation.hpp"

namespace evdet {
namespace {

std::vector<std::string> ids(int from, int to) {
  std::vector<std::string> out;
  for (int i = from; i < to; ++i) out.push_back(std::to_string(i));
  return out;
}

TEST(JaccardTest, Basics) {
  const auto a = ids(0, 4);
  const auto b = ids(2, 6);
  EXPECT_DOUBLE_EQ(jaccard(a, b), 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(jaccard(a, a), 1.0);
  EXPECT_DOUBLE_EQ(jaccard(a, ids(10, 12)), 0.0);
}

TEST(MatchEventsTest, PerfectDetection) {
  const GroundTruth truth = {{"a", 0, 10, ids(0, 10)}, {"b", 0, 10, ids(10, 20)}};
  const std::vector<DetectedEvent> detected = {{"1", ids(0, 10)}, {"2", ids(10, 20)}};
  const MatchResult r = match_events(detected, truth);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_TRUE(r.unmatched_detected.empty());
  EXPECT_TRUE(r.missed_truth.empty());
}

TEST(MatchEventsTest, OneOfTwoFound) {
  const GroundTruth truth = {{"a", 0, 10, ids(0, 10)}, {"b", 0, 10, ids(10, 20)}};
  const std::vector<DetectedEvent> detected = {{"1", ids(0, 8)}};
  const MatchResult r = match_events(detected, truth);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 0.5);
  EXPECT_DOUBLE_EQ(r.f1, 2.0 / 3.0);
  EXPECT_EQ(r.missed_truth, (std::vector<std::string>{"b"}));
}

TEST(MatchEventsTest, JaccardFloorIsInclusive) {
  const GroundTruth truth = {{"a", 0, 10, ids(0, 4)}};
  // {0,1} vs {0..3}: 2/4 = 0.5 matches; {0} vs {0..3}: 0.25 does not.
  EXPECT_EQ(match_events(std::vector<DetectedEvent>{{"1", ids(0, 2)}}, truth).precision, 1.0);
  EXPECT_EQ(match_events(std::vector<DetectedEvent>{{"1", ids(0, 1)}}, truth).precision, 0.0);
}

TEST(MatchEventsTest, SubEventsAndOneToOne) {
  const GroundTruth truth = {{"a", 0, 10, ids(0, 4)}};
  const std::vector<DetectedEvent> detected = {{"1", ids(0, 3)}, {"2", ids(0, 2)}};
  const MatchResult many = match_events(detected, truth);
  EXPECT_EQ(many.precision, 1.0);
  EXPECT_EQ(many.recall, 1.0);
  MatchPolicy strict;
  strict.allow_many_to_one = false;
  const MatchResult one = match_events(detected, truth, strict);
  EXPECT_EQ(one.precision, 0.5);
  EXPECT_EQ(one.recall, 1.0);
  ASSERT_EQ(one.pairs.size(), 1u);
  EXPECT_EQ(one.pairs[0].detected_id, "1");  // the higher Jaccard wins
}

TEST(MatchEventsTest, DegenerateInputsAreFlagged) {
  const MatchResult empty_truth =
      match_events(std::vector<DetectedEvent>{{"1", ids(0, 2)}}, GroundTruth{});
  EXPECT_TRUE(empty_truth.recall_degenerate);
  EXPECT_EQ(empty_truth.recall, 0.0);
  const MatchResult nothing = match_events({}, GroundTruth{{"a", 0, 1, ids(0, 2)}});
  EXPECT_TRUE(nothing.precision_degenerate);
  EXPECT_EQ(nothing.f1, 0.0);
}

TEST(MatchPolicyTest, Validation) {
  EXPECT_THROW(validate(MatchPolicy{0.0, true}), ConfigError);
  EXPECT_THROW(validate(MatchPolicy{1.1, true}), ConfigError);
  EXPECT_NO_THROW(validate(MatchPolicy{1.0, false}));
}

TEST(F1Property, HarmonicMeanAlgebra) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EXPECT_EQ(f1_score(0.0, 0.0), 0.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = unit(rng);
    const double r = unit(rng);
    const double f = f1_score(p, r);
    ASSERT_NEAR(1.0 / f, 0.5 * (1.0 / p + 1.0 / r), 1e-9 / f);
    ASSERT_LE(f, std::max(p, r) + 1e-15);
    ASSERT_GE(f, std::min(p, r) - 1e-15);
    ASSERT_EQ(f1_score(p, r), f1_score(r, p));
  }
}

TEST(MatchProperty, PermutationStable) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    GroundTruth truth;
    for (int e = 0; e < 4; ++e) truth.push_back({"t" + std::to_string(e), 0, 1, ids(e * 5, e * 5 + 5)});
    std::vector<DetectedEvent> detected;
    for (int d = 0; d < 6; ++d) {
      const int from = static_cast<int>(rng() % 20);
      detected.push_back({"d" + std::to_string(d), ids(from, from + 1 + static_cast<int>(rng() % 6))});
    }
    for (const bool many : {true, false}) {
      const MatchPolicy policy{0.3, many};
      const MatchResult base = match_events(detected, truth, policy);
      std::shuffle(detected.begin(), detected.end(), rng);
      const MatchResult shuffled = match_events(detected, truth, policy);
      ASSERT_EQ(base.precision, shuffled.precision);
      ASSERT_EQ(base.recall, shuffled.recall);
      ASSERT_EQ(base.pairs.size(), shuffled.pairs.size());
      for (std::size_t i = 0; i < base.pairs.size(); ++i) {
        ASSERT_EQ(base.pairs[i].detected_id, shuffled.pairs[i].detected_id);
        ASSERT_EQ(base.pairs[i].truth_id, shuffled.pairs[i].truth_id);
      }
    }
  }
}

// --- objective ------------------------------------------------------------

Member member(const std::string& id, const std::string& user, const std::string& text) {
  Member m;
  m.id = id;
  m.user = user;
  m.normalized = normalize_text(text);
  m.compressed_size = compressed_size(m.normalized, CompressorSpec{});
  return m;
}

TEST(ObjectiveTest, SingleClusterIsItsDiversity) {
  Cluster c(1, member("1", "a", "quake aceh"), "quake aceh", 10);
  c.add(member("2", "b", "quake aceh now"));
  c.add(member("3", "c", "aceh quake"));
  const std::vector<const Cluster*> clusters{&c};
  EXPECT_DOUBLE_EQ(objective_score(clusters, EngineConfig{}), std::log2(3.0));
}

TEST(ObjectiveTest, TwoSingletonsSumBothDirections) {
  const std::string x = "earthquake in aceh, tsunami warning";
  const std::string y = "boston marathon finish line explosion";
  Cluster a(1, member("1", "a", x), x, 10);
  Cluster b(2, member("2", "b", y), y, 10);
  const std::vector<const Cluster*> clusters{&a, &b};
  const CompressorSpec spec;
  EXPECT_DOUBLE_EQ(objective_score(clusters, EngineConfig{}),
                   pair_distance(normalize_text(x), normalize_text(y), spec) +
                       pair_distance(normalize_text(y), normalize_text(x), spec));
}

TEST(ObjectiveTest, NoClustersIsDegenerate) {
  EXPECT_THROW(objective_score({}, EngineConfig{}), DegenerateInputError);
}

// --- throughput -----------------------------------------------------------

TEST(ThroughputTest, ReferenceRow) {
  EngineCounters counters;
  counters.tweets_processed = 28182;
  counters.distance_calls = 28182 * 12;
  counters.max_distance_calls_per_tweet = 400;
  const ThroughputReport r = throughput_report(counters, 10.61 * 60.0, EngineConfig{});
  EXPECT_NEAR(r.minutes, 10.61, 1e-12);
  // Reference minutes are rounded to 0.01, so the printed rate is only
  // reproducible to 0.005 / 10.61 relative.
  EXPECT_NEAR(r.tweets_per_minute, 2656.06, 2656.06 * 0.005 / 10.61);
  EXPECT_DOUBLE_EQ(r.mean_distance_calls, 12.0);
  EXPECT_EQ(r.distance_call_bound, 100'000u);
  EXPECT_TRUE(r.within_bound);
}

TEST(ThroughputTest, OtherReferenceRows) {
  struct Row {
    std::uint64_t tweets;
    double minutes;
    double rate;
  };
  for (const Row row : {Row{13586, 4.79, 2834.92}, Row{20509, 6.40, 3204.44}}) {
    EngineCounters counters;
    counters.tweets_processed = row.tweets;
    const ThroughputReport r = throughput_report(counters, row.minutes * 60.0, EngineConfig{});
    EXPECT_NEAR(r.tweets_per_minute, row.rate, row.rate * 0.005 / row.minutes) << row.tweets;
  }
}

TEST(ThroughputTest, RejectsEmptyRuns) {
  EngineCounters counters;
  EXPECT_THROW(throughput_report(counters, 1.0, EngineConfig{}), std::invalid_argument);
  counters.tweets_processed = 5;
  EXPECT_THROW(throughput_report(counters, 0.0, EngineConfig{}), std::invalid_argument);
}

TEST(ThroughputTest, FlagsBoundViolation) {
  EngineConfig config;
  config.cluster_limit = 2;
  config.tweet_limit = 3;
  EngineCounters counters;
  counters.tweets_processed = 1;
  counters.max_distance_calls_per_tweet = 7;
  EXPECT_FALSE(throughput_report(counters, 1.0, config).within_bound);
}

TEST(ReportTest, TextAndJsonCarryTheSameKeys) {
  DetectionReport report;
  report.match = match_events(std::vector<DetectedEvent>{{"1", ids(0, 2)}},
                              GroundTruth{{"a", 0, 1, ids(0, 2)}});
  const std::string text = format_report_text(report);
  const std::string json = format_report_json(report);
  for (const char* key : {"precision", "recall", "f1", "tweets_per_minute"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
    EXPECT_NE(json.find(std::string("\"") + key + "\""), std::string::npos) << key;
  }
  EXPECT_NE(text.find("tweets_per_minute na"), std::string::npos);
  EXPECT_NE(json.find("\"tweets_per_minute\": null"), std::string::npos);
}

}  // namespace
}  // namespace evdet
