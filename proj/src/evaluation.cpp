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

#include "evdet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace evdet {

void validate(const MatchPolicy& policy) {
  // A floor of 0 would match disjoint member sets.
  if (!(policy.jaccard_min > 0.0 && policy.jaccard_min <= 1.0)) {
    throw ConfigError("jaccard_min must lie in (0, 1]");
  }
}

double jaccard(std::span<const std::string> a, std::span<const std::string> b) {
  const std::set<std::string_view> left(a.begin(), a.end());
  const std::set<std::string_view> right(b.begin(), b.end());
  if (left.empty() && right.empty()) return 0.0;
  std::size_t shared = 0;
  for (auto id : left) shared += right.count(id);
  return static_cast<double>(shared) / static_cast<double>(left.size() + right.size() - shared);
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

MatchResult match_events(std::span<const DetectedEvent> detected, const GroundTruth& truth,
                         const MatchPolicy& policy) {
  validate(policy);
  MatchResult result;
  result.detected_count = detected.size();
  result.truth_count = truth.size();

  struct Candidate {
    double score;
    std::size_t d;
    std::size_t t;
  };
  std::vector<Candidate> candidates;
  for (std::size_t d = 0; d < detected.size(); ++d) {
    for (std::size_t t = 0; t < truth.size(); ++t) {
      const double j = jaccard(detected[d].members, truth[t].members);
      if (j >= policy.jaccard_min && j > 0.0) candidates.push_back({j, d, t});
    }
  }
  // Best score first, then ids, so the outcome does not depend on input order.
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (detected[a.d].event_id != detected[b.d].event_id) {
      return detected[a.d].event_id < detected[b.d].event_id;
    }
    return truth[a.t].event_id < truth[b.t].event_id;
  });

  std::vector<bool> detected_used(detected.size(), false);
  std::vector<bool> truth_used(truth.size(), false);
  for (const auto& c : candidates) {
    if (detected_used[c.d]) continue;
    if (truth_used[c.t] && !policy.allow_many_to_one) continue;
    detected_used[c.d] = true;
    truth_used[c.t] = true;
    result.pairs.push_back({detected[c.d].event_id, truth[c.t].event_id, c.score});
  }
  std::sort(result.pairs.begin(), result.pairs.end(), [](const MatchPair& a, const MatchPair& b) {
    return a.detected_id != b.detected_id ? a.detected_id < b.detected_id
                                          : a.truth_id < b.truth_id;
  });
  for (std::size_t d = 0; d < detected.size(); ++d) {
    if (!detected_used[d]) result.unmatched_detected.push_back(detected[d].event_id);
  }
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (!truth_used[t]) result.missed_truth.push_back(truth[t].event_id);
  }
  std::sort(result.unmatched_detected.begin(), result.unmatched_detected.end());

  const auto matched_truth = static_cast<double>(std::count(truth_used.begin(), truth_used.end(), true));
  if (detected.empty()) {
    result.precision_degenerate = true;
  } else {
    result.precision = static_cast<double>(result.pairs.size()) / static_cast<double>(detected.size());
  }
  if (truth.empty()) {
    result.recall_degenerate = true;
  } else {
    result.recall = matched_truth / static_cast<double>(truth.size());
  }
  result.f1 = f1_score(result.precision, result.recall);
  return result;
}

double objective_score(std::span<const Cluster* const> clusters, const EngineConfig& config,
                       SizeCache* cache) {
  if (clusters.empty()) throw DegenerateInputError("objective over zero clusters");
  double total = 0.0;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    double separation = 0.0;
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      if (i != j) separation += cluster_pair_distance(*clusters[i], *clusters[j], config, cache);
    }
    total += separation + clusters[i]->diversity();
  }
  return total;
}

ThroughputReport throughput_report(const EngineCounters& counters, double wall_seconds,
                                   const EngineConfig& config) {
  if (counters.tweets_processed == 0) throw std::invalid_argument("no tweets were processed");
  if (!(wall_seconds > 0.0) || !std::isfinite(wall_seconds)) {
    throw std::invalid_argument("wall time is below the timer resolution");
  }
  ThroughputReport report;
  report.tweets = counters.tweets_processed;
  report.wall_seconds = wall_seconds;
  report.minutes = wall_seconds / 60.0;
  report.tweets_per_minute = static_cast<double>(report.tweets) / report.minutes;
  report.mean_distance_calls =
      static_cast<double>(counters.distance_calls) / static_cast<double>(report.tweets);
  report.max_distance_calls = counters.max_distance_calls_per_tweet;
  report.distance_call_bound =
      static_cast<std::uint64_t>(config.cluster_limit) * static_cast<std::uint64_t>(config.tweet_limit);
  report.within_bound = report.max_distance_calls <= report.distance_call_bound;
  report.peak_active_clusters = counters.peak_active_clusters;
  return report;
}

namespace {

nlohmann::ordered_json report_object(const DetectionReport& report) {
  const auto& m = report.match;
  nlohmann::ordered_json o;
  o["precision"] = m.precision;
  o["recall"] = m.recall;
  o["f1"] = m.f1;
  o["detected_count"] = m.detected_count;
  o["truth_count"] = m.truth_count;
  o["matched_pairs"] = m.pairs.size();
  o["precision_degenerate"] = m.precision_degenerate;
  o["recall_degenerate"] = m.recall_degenerate;
  o["unmatched_detected"] = m.unmatched_detected;
  o["missed_truth"] = m.missed_truth;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& p : m.pairs) {
    pairs.push_back({{"detected", p.detected_id}, {"truth", p.truth_id}, {"jaccard", p.jaccard}});
  }
  o["pairs"] = pairs;
  const auto& t = report.throughput;
  o["tweets"] = t ? nlohmann::ordered_json(t->tweets) : nullptr;
  o["processing_minutes"] = t ? nlohmann::ordered_json(t->minutes) : nullptr;
  o["tweets_per_minute"] = t ? nlohmann::ordered_json(t->tweets_per_minute) : nullptr;
  o["collection_per_minute"] =
      t && t->collection_per_minute ? nlohmann::ordered_json(*t->collection_per_minute) : nullptr;
  o["distance_calls_mean"] = t ? nlohmann::ordered_json(t->mean_distance_calls) : nullptr;
  o["distance_calls_max"] = t ? nlohmann::ordered_json(t->max_distance_calls) : nullptr;
  o["distance_call_bound"] = t ? nlohmann::ordered_json(t->distance_call_bound) : nullptr;
  o["peak_active_clusters"] = t ? nlohmann::ordered_json(t->peak_active_clusters) : nullptr;
  return o;
}

}  // namespace

std::string format_report_text(const DetectionReport& report) {
  std::ostringstream out;
  const auto object = report_object(report);
  for (const auto& item : object.items()) {
    out << item.key() << ' ';
    const auto& value = item.value();
    if (value.is_null()) {
      out << "na";
    } else if (value.is_array()) {
      // Lists print comma-joined; pairs as detected:truth:jaccard.
      bool first = true;
      for (const auto& entry : value) {
        if (!first) out << ',';
        first = false;
        if (entry.is_object()) {
          out << entry["detected"].get<std::string>() << ':' << entry["truth"].get<std::string>()
              << ':' << entry["jaccard"].dump();
        } else {
          out << entry.get<std::string>();
        }
      }
      if (first) out << '-';
    } else {
      out << value.dump();
    }
    out << '\n';
  }
  return out.str();
}

std::string format_report_json(const DetectionReport& report) {
  return report_object(report).dump(2) + "\n";
}

}  // namespace evdet
