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
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evdet/compression.hpp"
#include "evdet/text.hpp"

namespace evdet {

using Timestamp = std::int64_t;  // seconds since epoch
using ClusterId = std::uint64_t;
using EventId = std::uint64_t;

inline constexpr std::size_t kMaxTweetCodePoints = 140;
inline constexpr std::size_t kMaxTweetBytes = 560;
inline constexpr std::size_t kKeywordCount = 5;

struct Tweet {
  std::string id;
  std::string user;
  Timestamp timestamp = 0;
  std::string text;                 // as received (after truncation)
  std::string normalized;           // NFC + lowercase; what the compressor sees
  std::vector<std::string> tokens;  // derived from `normalized`
};

// Builds a validated tweet. Throws DegenerateInputError for blank text and
// std::invalid_argument for an empty id/user, a negative timestamp, or text
// over the byte limit.
Tweet make_tweet(std::string id, std::string user, Timestamp timestamp, std::string text,
                 const Stoplist& stoplist = Stoplist::builtin());

// Running estimate of the exponential inter-arrival model. Gaps are whole
// seconds so the running mean is kept as an exact integer sum.
struct LambdaState {
  std::uint64_t sample_count = 0;  // number of observed gaps
  std::int64_t gap_sum = 0;
  Timestamp last_arrival = 0;
  bool started = false;

  // Mean inter-arrival gap; empty until a gap has been observed.
  std::optional<double> mean_gap() const;
  // Maximum-likelihood rate 1 / mean_gap; empty when the mean is undefined or 0.
  std::optional<double> rate() const;
};

// First call records the arrival only; later calls add one gap. Throws
// std::invalid_argument if `new_arrival` precedes the last arrival.
LambdaState update_lambda(LambdaState state, Timestamp new_arrival);

enum class OverlapWeighting : std::uint8_t {
  kDistinctTokens,  // number of shared distinct tokens
  kTokenFrequency,  // shared tokens weighted by their frequency in the cluster window
};

struct EngineConfig {
  std::size_t cluster_limit = 100;  // candidates compared per tweet
  std::size_t tweet_limit = 1000;   // recent members used for distance
  double distance_threshold = 0.8;  // max distance for assignment
  double diversity_threshold = 5.0; // promotion cutoff, bits
  CompressorSpec compressor{};
  std::uint64_t min_inter_arrival_samples = 2;
  double default_timeout = 3600.0;  // seconds
  double timeout_multiplier = 1.0;
  Timestamp allowed_disorder = 0;   // seconds a tweet may lag the stream clock
  OverlapWeighting overlap = OverlapWeighting::kDistinctTokens;
  std::size_t threads = 1;          // workers for distance evaluation; 1 = sequential

  static constexpr double kEntropyLogBase = 2.0;
};

// Throws ConfigError naming the offending field.
void validate(const EngineConfig& config);

// One cluster member as kept in the recent-tweet window.
struct Member {
  std::string id;
  std::string user;
  Timestamp timestamp = 0;
  std::string normalized;
  std::vector<std::string> tokens;
  std::size_t compressed_size = 0;  // C(normalized)
};

// Window tokens whose presence changed during a mutation.
struct TokenDelta {
  std::vector<std::string> appeared;
  std::vector<std::string> vanished;
};

class Cluster {
 public:
  Cluster(ClusterId id, Member first, std::string first_text, std::size_t tweet_limit);

  // Adds a member and keeps every derived field consistent. Members are kept
  // ordered by timestamp (arrival order on ties); the oldest falls out of the
  // window once it exceeds the tweet limit.
  void add(Member member, TokenDelta* delta = nullptr);

  // Monotone: once set the flag is never cleared.
  void mark_event(EventId event_id, Timestamp at);

  ClusterId id() const noexcept { return id_; }
  const std::deque<Member>& window() const noexcept { return window_; }
  std::size_t tweet_limit() const noexcept { return tweet_limit_; }
  std::uint64_t size() const noexcept { return count_; }
  const std::map<std::string, std::uint64_t>& user_counts() const noexcept { return user_counts_; }
  std::size_t unique_users() const noexcept { return user_counts_.size(); }
  double diversity() const noexcept { return diversity_; }
  const LambdaState& lambda() const noexcept { return lambda_; }
  bool is_event() const noexcept { return event_id_.has_value(); }
  std::optional<EventId> event_id() const noexcept { return event_id_; }
  double diversity_at_promotion() const noexcept { return diversity_at_promotion_; }
  Timestamp promoted_at() const noexcept { return promoted_at_; }
  Timestamp created_at() const noexcept { return created_at_; }
  Timestamp last_updated() const noexcept { return last_updated_; }
  const std::unordered_map<std::string, std::uint32_t>& token_counts() const noexcept {
    return token_counts_;
  }
  // Every member id ever added, in insertion order.
  const std::vector<std::string>& member_ids() const noexcept { return member_ids_; }
  const std::string& first_id() const noexcept { return first_id_; }
  Timestamp first_timestamp() const noexcept { return first_timestamp_; }
  const std::string& first_text() const noexcept { return first_text_; }
  std::uint64_t version() const noexcept { return version_; }

 private:
  void count_tokens(const Member& member, int sign, TokenDelta* delta);

  ClusterId id_;
  std::size_t tweet_limit_;
  std::deque<Member> window_;
  std::uint64_t count_ = 0;
  std::map<std::string, std::uint64_t> user_counts_;
  double diversity_ = 0.0;
  LambdaState lambda_;
  std::optional<EventId> event_id_;
  double diversity_at_promotion_ = 0.0;
  Timestamp promoted_at_ = 0;
  Timestamp created_at_ = 0;
  Timestamp last_updated_ = 0;
  std::unordered_map<std::string, std::uint32_t> token_counts_;
  std::vector<std::string> member_ids_;
  std::string first_id_;
  Timestamp first_timestamp_ = 0;
  std::string first_text_;
  std::uint64_t version_ = 0;
};

struct FirstTweet {
  std::string id;
  Timestamp timestamp = 0;
  std::string text;
};

// A promoted cluster. `closed_at` is empty for promotion notices.
struct Event {
  EventId event_id = 0;
  ClusterId cluster_id = 0;
  FirstTweet first_tweet;
  std::vector<std::string> keywords;
  std::uint64_t tweet_count = 0;
  std::uint64_t unique_users = 0;
  double diversity_at_promotion = 0.0;
  Timestamp promoted_at = 0;
  std::optional<Timestamp> closed_at;
  std::vector<std::string> member_ids;  // filled for closed events
};

// Shannon entropy (bits) of the per-user tweet counts. Throws
// std::invalid_argument on an empty mapping or a zero total.
double user_diversity(const std::map<std::string, std::uint64_t>& user_counts);
double user_diversity(std::span<const std::uint64_t> counts);

// last_arrival + timeout_multiplier * mean_gap once enough gaps were seen and
// the mean is positive; otherwise last_arrival + default_timeout.
double expiry_deadline(const LambdaState& lambda, const EngineConfig& config);
double expiry_deadline(const Cluster& cluster, const EngineConfig& config);

// Largest D(text, member) over the cluster window.
double tweet_cluster_distance(const Tweet& tweet, const Cluster& cluster,
                              const EngineConfig& config, SizeCache* cache = nullptr);

struct WindowDistance {
  double max_distance = 0.0;
  std::size_t calls = 0;
  bool exceeded = false;  // stopped early because max_distance > cutoff
};

// Same maximum, but stops as soon as it exceeds `cutoff` since such a cluster
// can no longer qualify. Scans newest members first.
WindowDistance bounded_window_distance(Compressor& compressor, std::string_view text,
                                       std::size_t text_size, const Cluster& cluster,
                                       double cutoff);

// Largest D(x, y) over x in a's window and y in b's window.
double cluster_pair_distance(const Cluster& a, const Cluster& b, const EngineConfig& config,
                             SizeCache* cache = nullptr);

// The n most frequent non-stoplisted tokens; ties broken lexicographically.
std::vector<std::string> top_keywords(const std::unordered_map<std::string, std::uint32_t>& counts,
                                      std::size_t n, const Stoplist& stoplist = Stoplist::builtin());
std::vector<std::string> top_keywords(const Cluster& cluster, std::size_t n = kKeywordCount,
                                      const Stoplist& stoplist = Stoplist::builtin());

}  // namespace evdet
