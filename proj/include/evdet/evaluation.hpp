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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evdet/engine.hpp"
#include "evdet/event_io.hpp"
#include "evdet/ingestion.hpp"

namespace evdet {

struct MatchPolicy {
  double jaccard_min = 0.5;
  // When true several detected events (sub-events) may match one truth event.
  bool allow_many_to_one = true;
};

void validate(const MatchPolicy& policy);

struct MatchPair {
  std::string detected_id;
  std::string truth_id;
  double jaccard = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // ordered by detected id
  std::vector<std::string> unmatched_detected;
  std::vector<std::string> missed_truth;
  std::size_t detected_count = 0;
  std::size_t truth_count = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_degenerate = false;  // no detected events
  bool recall_degenerate = false;     // empty truth
};

double jaccard(std::span<const std::string> a, std::span<const std::string> b);

// 2PR / (P + R), or 0 when P + R == 0.
double f1_score(double precision, double recall);

// Precision is matched detected / detected; recall is distinct truth events
// matched / truth events. Independent of the order of `detected`.
MatchResult match_events(std::span<const DetectedEvent> detected, const GroundTruth& truth,
                         const MatchPolicy& policy = {});

// Sum over clusters of (sum of max-pairwise distances to every other cluster
// + user diversity). Throws DegenerateInputError for no clusters.
double objective_score(std::span<const Cluster* const> clusters, const EngineConfig& config,
                       SizeCache* cache = nullptr);

struct ThroughputReport {
  std::uint64_t tweets = 0;
  double wall_seconds = 0.0;
  double minutes = 0.0;
  double tweets_per_minute = 0.0;
  std::optional<double> collection_per_minute;  // stream-time arrival rate, when known
  double mean_distance_calls = 0.0;
  std::uint64_t max_distance_calls = 0;
  std::uint64_t distance_call_bound = 0;  // cluster_limit * tweet_limit
  bool within_bound = true;
  std::uint64_t peak_active_clusters = 0;
};

// Throws std::invalid_argument when no tweets were processed or the wall time
// is not positive.
ThroughputReport throughput_report(const EngineCounters& counters, double wall_seconds,
                                   const EngineConfig& config);

struct DetectionReport {
  MatchResult match;
  std::optional<ThroughputReport> throughput;
};

// `key value` lines and a JSON object carrying the same keys.
std::string format_report_text(const DetectionReport& report);
std::string format_report_json(const DetectionReport& report);

}  // namespace evdet
