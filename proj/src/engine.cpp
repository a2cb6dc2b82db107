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

#include "evdet/engine.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>

#include "evdet/errors.hpp"

namespace evdet {

// Fixed set of threads that run one indexed loop at a time. The calling
// thread takes part in the loop.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers) {
    for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { loop(); });
  }

  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void run(std::size_t n, const std::function<void(std::size_t)>& body) {
    {
      std::lock_guard lock(mu_);
      body_ = &body;
      size_ = n;
      next_.store(0);
      active_ = threads_.size();
      ++generation_;
    }
    wake_.notify_all();
    drain();
    std::unique_lock lock(mu_);
    done_.wait(lock, [this] { return active_ == 0; });
    body_ = nullptr;
  }

 private:
  void drain() {
    for (std::size_t i = next_.fetch_add(1); i < size_; i = next_.fetch_add(1)) (*body_)(i);
  }

  void loop() {
    std::uint64_t seen = 0;
    for (;;) {
      {
        std::unique_lock lock(mu_);
        wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
      }
      drain();
      {
        std::lock_guard lock(mu_);
        --active_;
      }
      done_.notify_one();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t size_ = 0;
  std::atomic<std::size_t> next_{0};
  std::size_t active_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

Engine::Engine(EngineConfig config, EventSink* sink) : config_(std::move(config)), sink_(sink) {
  validate(config_);
  if (config_.threads > 1) pool_ = std::make_unique<WorkerPool>(config_.threads - 1);
}

Engine::~Engine() = default;

const Cluster* Engine::find_cluster(ClusterId id) const {
  auto it = clusters_.find(id);
  return it == clusters_.end() ? nullptr : &it->second;
}

std::vector<CandidateScore> Engine::candidate_clusters(const Tweet& tweet, std::size_t k) const {
  std::vector<std::string_view> tokens(tweet.tokens.begin(), tweet.tokens.end());
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

  // Dense accumulator indexed by cluster id; hot tokens can touch thousands
  // of clusters per tweet, which a hash map handles poorly.
  if (overlap_scratch_.size() < next_cluster_id_) overlap_scratch_.resize(next_cluster_id_, 0);
  touched_.clear();
  for (auto token : tokens) {
    auto hit = index_.find(std::string(token));
    if (hit == index_.end()) continue;
    for (ClusterId id : hit->second) {
      std::uint64_t weight = 1;
      if (config_.overlap == OverlapWeighting::kTokenFrequency) {
        weight = clusters_.at(id).token_counts().at(std::string(token));
      }
      if (overlap_scratch_[id] == 0) touched_.push_back(id);
      overlap_scratch_[id] += weight;
    }
  }
  std::vector<CandidateScore> ranked;
  ranked.reserve(touched_.size());
  for (ClusterId id : touched_) {
    ranked.push_back({id, overlap_scratch_[id], recency_[id]});
    overlap_scratch_[id] = 0;
  }
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), [](const CandidateScore& a, const CandidateScore& b) {
                      if (a.overlap != b.overlap) return a.overlap > b.overlap;
                      if (a.recency != b.recency) return a.recency > b.recency;
                      return a.cluster_id < b.cluster_id;
                    });
  ranked.resize(keep);
  return ranked;
}

ProcessOutcome Engine::process(const Tweet& tweet) {
  if (started_ && tweet.timestamp + config_.allowed_disorder < clock_) {
    throw OrderingError("tweet " + tweet.id + " at " + std::to_string(tweet.timestamp) +
                        " is older than the stream clock " + std::to_string(clock_));
  }
  if (tweet.normalized.empty()) throw DegenerateInputError("tweet " + tweet.id + " has no text");
  const Timestamp now = started_ ? std::max(clock_, tweet.timestamp) : tweet.timestamp;
  clock_ = now;
  started_ = true;

  ProcessOutcome outcome;
  outcome.closed = evict_inactive(now);

  const auto candidates = candidate_clusters(tweet, config_.cluster_limit);
  outcome.candidates = candidates.size();

  Compressor& compressor = thread_compressor(config_.compressor);
  const std::size_t text_size = compressor.compressed_size(tweet.normalized);

  std::vector<WindowDistance> scored(candidates.size());
  auto score = [&](std::size_t i) {
    scored[i] = bounded_window_distance(thread_compressor(config_.compressor), tweet.normalized,
                                        text_size, clusters_.at(candidates[i].cluster_id),
                                        config_.distance_threshold);
  };
  if (pool_ && candidates.size() > 1) {
    pool_->run(candidates.size(), score);
  } else {
    for (std::size_t i = 0; i < candidates.size(); ++i) score(i);
  }

  // Closest qualifying candidate; ties go to the higher-ranked one.
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    outcome.distance_calls += scored[i].calls;
    if (scored[i].exceeded || scored[i].max_distance > config_.distance_threshold) continue;
    if (!best || scored[i].max_distance < scored[*best].max_distance) best = i;
  }

  Member member{tweet.id, tweet.user, tweet.timestamp, tweet.normalized, tweet.tokens, text_size};
  TokenDelta delta;
  Cluster* target = nullptr;
  if (best) {
    target = &clusters_.at(candidates[*best].cluster_id);
    target->add(std::move(member), &delta);
    outcome.kind = ProcessOutcome::Kind::kAssigned;
    outcome.distance = scored[*best].max_distance;
    ++counters_.assigned;
    if (!target->is_event() && target->diversity() >= config_.diversity_threshold) {
      target->mark_event(next_event_id_++, now);
      ++counters_.events_promoted;
      outcome.promotion = snapshot(*target);
      if (sink_) sink_->on_promotion(*outcome.promotion);
    }
  } else {
    const ClusterId id = next_cluster_id_++;
    Cluster cluster(id, std::move(member), tweet.text, config_.tweet_limit);
    for (const auto& [token, count] : cluster.token_counts()) delta.appeared.push_back(token);
    target = &clusters_.emplace(id, std::move(cluster)).first->second;
    outcome.kind = ProcessOutcome::Kind::kCreated;
    ++counters_.clusters_created;
  }
  outcome.cluster_id = target->id();
  if (recency_.size() <= target->id()) recency_.resize(target->id() + 1, 0);
  recency_[target->id()] = target->last_updated();
  index_tokens(target->id(), delta);
  schedule(*target);

  ++counters_.tweets_processed;
  counters_.distance_calls += outcome.distance_calls;
  counters_.max_distance_calls_per_tweet =
      std::max<std::uint64_t>(counters_.max_distance_calls_per_tweet, outcome.distance_calls);
  counters_.max_candidates_per_tweet =
      std::max<std::uint64_t>(counters_.max_candidates_per_tweet, outcome.candidates);
  counters_.peak_active_clusters =
      std::max<std::uint64_t>(counters_.peak_active_clusters, clusters_.size());
  return outcome;
}

std::vector<Event> Engine::evict_inactive(Timestamp now) {
  std::vector<Event> closed;
  const auto limit = static_cast<double>(now);
  while (!deadlines_.empty() && deadlines_.top().at < limit) {
    const Deadline due = deadlines_.top();
    deadlines_.pop();
    auto it = clusters_.find(due.cluster_id);
    if (it == clusters_.end() || it->second.version() != due.version) continue;
    Cluster& cluster = it->second;
    if (cluster.is_event()) {
      closed.push_back(close(cluster, now));
      ++counters_.events_closed;
      if (sink_) sink_->on_closed(closed.back());
    }
    unindex(cluster);
    clusters_.erase(it);
    ++counters_.clusters_evicted;
  }
  return closed;
}

std::vector<Event> Engine::finalize() {
  std::vector<Event> closed;
  for (auto& [id, cluster] : clusters_) {
    if (!cluster.is_event()) continue;
    closed.push_back(close(cluster, clock_));
    ++counters_.events_closed;
    if (sink_) sink_->on_closed(closed.back());
  }
  clusters_.clear();
  index_.clear();
  deadlines_ = {};
  return closed;
}

Event Engine::snapshot(const Cluster& cluster) const {
  Event event;
  event.event_id = cluster.event_id().value_or(0);
  event.cluster_id = cluster.id();
  event.first_tweet = {cluster.first_id(), cluster.first_timestamp(), cluster.first_text()};
  event.keywords = top_keywords(cluster);
  event.tweet_count = cluster.size();
  event.unique_users = cluster.unique_users();
  event.diversity_at_promotion = cluster.diversity_at_promotion();
  event.promoted_at = cluster.promoted_at();
  return event;
}

Event Engine::close(Cluster& cluster, Timestamp closed_at) const {
  Event event = snapshot(cluster);
  event.closed_at = std::max(closed_at, event.promoted_at);
  event.member_ids = cluster.member_ids();
  return event;
}

void Engine::index_tokens(ClusterId id, const TokenDelta& delta) {
  for (const auto& token : delta.appeared) index_[token].push_back(id);
  for (const auto& token : delta.vanished) drop_posting(token, id);
}

void Engine::unindex(const Cluster& cluster) {
  for (const auto& [token, count] : cluster.token_counts()) drop_posting(token, cluster.id());
}

void Engine::drop_posting(const std::string& token, ClusterId id) {
  auto it = index_.find(token);
  if (it == index_.end()) return;
  auto& ids = it->second;
  auto pos = std::find(ids.begin(), ids.end(), id);
  if (pos == ids.end()) return;
  *pos = ids.back();
  ids.pop_back();
  if (ids.empty()) index_.erase(it);
}

void Engine::schedule(const Cluster& cluster) {
  deadlines_.push({expiry_deadline(cluster, config_), cluster.id(), cluster.version()});
  compact_deadlines();
}

void Engine::compact_deadlines() {
  if (deadlines_.size() <= 4 * clusters_.size() + 4096) return;
  std::vector<Deadline> live;
  live.reserve(clusters_.size());
  for (const auto& [id, cluster] : clusters_) {
    live.push_back({expiry_deadline(cluster, config_), id, cluster.version()});
  }
  deadlines_ = decltype(deadlines_)(std::greater<>(), std::move(live));
}

std::map<std::string, std::set<ClusterId>> Engine::index_snapshot() const {
  std::map<std::string, std::set<ClusterId>> out;
  for (const auto& [token, ids] : index_) out[token].insert(ids.begin(), ids.end());
  return out;
}

std::map<std::string, std::set<ClusterId>> Engine::rebuild_index() const {
  std::map<std::string, std::set<ClusterId>> out;
  for (const auto& [id, cluster] : clusters_) {
    for (const auto& [token, count] : cluster.token_counts()) out[token].insert(id);
  }
  return out;
}

}  // namespace evdet
