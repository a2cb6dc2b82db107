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
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "evdet/model.hpp"

namespace evdet {

// Receives promotion notices and closed events as they happen.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void on_promotion(const Event& event) = 0;
  virtual void on_closed(const Event& event) = 0;
};

struct CandidateScore {
  ClusterId cluster_id = 0;
  std::uint64_t overlap = 0;
  Timestamp recency = 0;
};

struct EngineCounters {
  std::uint64_t tweets_processed = 0;
  std::uint64_t assigned = 0;
  std::uint64_t clusters_created = 0;
  std::uint64_t clusters_evicted = 0;  // every removal, event or not
  std::uint64_t events_promoted = 0;
  std::uint64_t events_closed = 0;
  std::uint64_t distance_calls = 0;
  std::uint64_t max_distance_calls_per_tweet = 0;
  std::uint64_t max_candidates_per_tweet = 0;
  std::uint64_t peak_active_clusters = 0;
};

struct ProcessOutcome {
  enum class Kind { kAssigned, kCreated };
  Kind kind = Kind::kCreated;
  ClusterId cluster_id = 0;
  std::optional<double> distance;  // distance to the chosen cluster when assigned
  std::size_t candidates = 0;
  std::size_t distance_calls = 0;
  std::optional<Event> promotion;
  std::vector<Event> closed;  // events closed by the eviction sweep before assignment
};

class WorkerPool;

// Single-pass clusterer. Calls to process() must be serialized; with
// config.threads > 1 the distance evaluations inside one call run on a worker
// pool, and the result is identical to the sequential path.
class Engine {
 public:
  explicit Engine(EngineConfig config, EventSink* sink = nullptr);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Throws OrderingError (state unchanged) when the tweet lags the clock by
  // more than allowed_disorder.
  ProcessOutcome process(const Tweet& tweet);

  // Removes every cluster whose expiry deadline is strictly before `now`.
  // Event clusters come back as closed events (closed_at = now).
  std::vector<Event> evict_inactive(Timestamp now);

  // Closes all remaining event clusters at the current clock and empties the
  // state. Counters are preserved.
  std::vector<Event> finalize();

  // Clusters sharing at least one token with the tweet, ranked by
  // (overlap desc, last_updated desc, cluster_id asc), at most k. Uses
  // internal scratch space, so it must not race with other engine calls.
  std::vector<CandidateScore> candidate_clusters(const Tweet& tweet, std::size_t k) const;

  const EngineConfig& config() const noexcept { return config_; }
  const EngineCounters& counters() const noexcept { return counters_; }
  Timestamp clock() const noexcept { return clock_; }
  std::size_t active_cluster_count() const noexcept { return clusters_.size(); }
  const std::map<ClusterId, Cluster>& clusters() const noexcept { return clusters_; }
  const Cluster* find_cluster(ClusterId id) const;

  // The incremental index, and one rebuilt from the clusters' token counts.
  // They must always be equal.
  std::map<std::string, std::set<ClusterId>> index_snapshot() const;
  std::map<std::string, std::set<ClusterId>> rebuild_index() const;

 private:
  struct Deadline {
    double at = 0.0;
    ClusterId cluster_id = 0;
    std::uint64_t version = 0;
    bool operator>(const Deadline& other) const {
      return at != other.at ? at > other.at : cluster_id > other.cluster_id;
    }
  };

  Event snapshot(const Cluster& cluster) const;
  Event close(Cluster& cluster, Timestamp closed_at) const;
  void index_tokens(ClusterId id, const TokenDelta& delta);
  void unindex(const Cluster& cluster);
  void drop_posting(const std::string& token, ClusterId id);
  void schedule(const Cluster& cluster);
  void compact_deadlines();

  EngineConfig config_;
  EventSink* sink_;
  std::map<ClusterId, Cluster> clusters_;
  // Token -> clusters whose window contains it. Posting lists are unordered;
  // ranking imposes a total order afterwards.
  std::unordered_map<std::string, std::vector<ClusterId>> index_;
  std::priority_queue<Deadline, std::vector<Deadline>, std::greater<>> deadlines_;
  Timestamp clock_ = 0;
  bool started_ = false;
  ClusterId next_cluster_id_ = 1;
  EventId next_event_id_ = 1;
  EngineCounters counters_;
  std::unique_ptr<WorkerPool> pool_;
  std::vector<Timestamp> recency_;  // last_updated by cluster id
  mutable std::vector<std::uint64_t> overlap_scratch_;
  mutable std::vector<ClusterId> touched_;
};

}  // namespace evdet
