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

#include "evdet/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evdet/errors.hpp"

namespace evdet {

Tweet make_tweet(std::string id, std::string user, Timestamp timestamp, std::string text,
                 const Stoplist& stoplist) {
  if (id.empty()) throw std::invalid_argument("tweet id is empty");
  if (user.empty()) throw std::invalid_argument("tweet user is empty");
  if (timestamp < 0) throw std::invalid_argument("tweet timestamp is negative");
  if (trim(text).empty()) throw DegenerateInputError("tweet text is empty");
  if (text.size() > kMaxTweetBytes) throw std::invalid_argument("tweet text exceeds 560 bytes");

  Tweet tweet;
  tweet.id = std::move(id);
  tweet.user = std::move(user);
  tweet.timestamp = timestamp;
  tweet.text = std::move(text);
  tweet.normalized = normalize_text(tweet.text);
  tweet.tokens = tokenize(tweet.normalized, stoplist);
  return tweet;
}

std::optional<double> LambdaState::mean_gap() const {
  if (sample_count == 0) return std::nullopt;
  return static_cast<double>(gap_sum) / static_cast<double>(sample_count);
}

std::optional<double> LambdaState::rate() const {
  const auto mean = mean_gap();
  if (!mean || *mean <= 0.0) return std::nullopt;
  return 1.0 / *mean;
}

LambdaState update_lambda(LambdaState state, Timestamp new_arrival) {
  if (!state.started) {
    state.started = true;
    state.last_arrival = new_arrival;
    return state;
  }
  if (new_arrival < state.last_arrival) {
    throw std::invalid_argument("arrival precedes the previous arrival");
  }
  state.gap_sum += new_arrival - state.last_arrival;
  ++state.sample_count;
  state.last_arrival = new_arrival;
  return state;
}

void validate(const EngineConfig& config) {
  if (config.cluster_limit < 1) throw ConfigError("cluster_limit must be >= 1");
  if (config.tweet_limit < 1) throw ConfigError("tweet_limit must be >= 1");
  if (!(config.distance_threshold > 0.0 && config.distance_threshold < 1.5)) {
    throw ConfigError("distance_threshold must lie in (0, 1.5)");
  }
  if (!(config.diversity_threshold >= 0.0) || !std::isfinite(config.diversity_threshold)) {
    throw ConfigError("diversity_threshold must be >= 0");
  }
  if (!(config.default_timeout > 0.0) || !std::isfinite(config.default_timeout)) {
    throw ConfigError("default_timeout must be > 0");
  }
  if (!(config.timeout_multiplier > 0.0) || !std::isfinite(config.timeout_multiplier)) {
    throw ConfigError("timeout_multiplier must be > 0");
  }
  if (config.allowed_disorder < 0) throw ConfigError("allowed_disorder must be >= 0");
  if (config.threads < 1) throw ConfigError("threads must be >= 1");
  validate(config.compressor);
}

Cluster::Cluster(ClusterId id, Member first, std::string first_text, std::size_t tweet_limit)
    : id_(id),
      tweet_limit_(tweet_limit == 0 ? 1 : tweet_limit),
      created_at_(first.timestamp),
      first_id_(first.id),
      first_timestamp_(first.timestamp),
      first_text_(std::move(first_text)) {
  add(std::move(first));
}

void Cluster::count_tokens(const Member& member, int sign, TokenDelta* delta) {
  for (const auto& token : member.tokens) {
    if (sign > 0) {
      auto& count = token_counts_[token];
      if (count++ == 0 && delta) delta->appeared.push_back(token);
    } else {
      auto it = token_counts_.find(token);
      if (it == token_counts_.end()) continue;
      if (--it->second == 0) {
        if (delta) delta->vanished.push_back(token);
        token_counts_.erase(it);
      }
    }
  }
}

void Cluster::add(Member member, TokenDelta* delta) {
  ++count_;
  ++version_;
  ++user_counts_[member.user];
  diversity_ = user_diversity(user_counts_);
  member_ids_.push_back(member.id);

  // Late arrivals (within the allowed disorder) count as zero gaps.
  lambda_ = update_lambda(lambda_, std::max(member.timestamp, lambda_.started ? lambda_.last_arrival
                                                                              : member.timestamp));
  last_updated_ = std::max(last_updated_, member.timestamp);
  if (member.timestamp < first_timestamp_) {
    first_timestamp_ = member.timestamp;
    first_id_ = member.id;
  }

  count_tokens(member, +1, delta);
  auto pos = std::upper_bound(window_.begin(), window_.end(), member.timestamp,
                              [](Timestamp ts, const Member& m) { return ts < m.timestamp; });
  window_.insert(pos, std::move(member));
  while (window_.size() > tweet_limit_) {
    count_tokens(window_.front(), -1, delta);
    window_.pop_front();
  }
  if (delta) {
    // A token can appear and vanish within one mutation; report net changes.
    auto net = [this](std::vector<std::string>& tokens, bool present) {
      std::erase_if(tokens, [&](const std::string& t) {
        return token_counts_.contains(t) != present;
      });
      std::sort(tokens.begin(), tokens.end());
      tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    };
    net(delta->appeared, true);
    net(delta->vanished, false);
  }
}

void Cluster::mark_event(EventId event_id, Timestamp at) {
  if (event_id_) return;
  event_id_ = event_id;
  diversity_at_promotion_ = diversity_;
  promoted_at_ = at;
}

double user_diversity(std::span<const std::uint64_t> counts) {
  if (counts.empty()) throw std::invalid_argument("user diversity of an empty cluster");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::invalid_argument("user diversity with zero tweets");
  const double n = static_cast<double>(total);
  double entropy = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    entropy -= p * std::log2(p);
  }
  // Rounding can leave a single-user cluster at -0.0.
  return entropy <= 0.0 ? 0.0 : entropy;
}

double user_diversity(const std::map<std::string, std::uint64_t>& user_counts) {
  std::vector<std::uint64_t> counts;
  counts.reserve(user_counts.size());
  for (const auto& [user, count] : user_counts) counts.push_back(count);
  return user_diversity(counts);
}

double expiry_deadline(const LambdaState& lambda, const EngineConfig& config) {
  const auto last = static_cast<double>(lambda.last_arrival);
  const auto mean = lambda.mean_gap();
  if (lambda.sample_count >= config.min_inter_arrival_samples && mean && *mean > 0.0) {
    return last + config.timeout_multiplier * *mean;
  }
  return last + config.default_timeout;
}

double expiry_deadline(const Cluster& cluster, const EngineConfig& config) {
  return expiry_deadline(cluster.lambda(), config);
}

WindowDistance bounded_window_distance(Compressor& compressor, std::string_view text,
                                       std::size_t text_size, const Cluster& cluster,
                                       double cutoff) {
  WindowDistance result;
  const auto& window = cluster.window();
  for (auto it = window.rbegin(); it != window.rend(); ++it) {
    const double d = compressor.distance(text, text_size, it->normalized, it->compressed_size);
    ++result.calls;
    if (result.calls == 1 || d > result.max_distance) result.max_distance = d;
    if (result.max_distance > cutoff) {
      result.exceeded = true;
      break;
    }
  }
  return result;
}

double tweet_cluster_distance(const Tweet& tweet, const Cluster& cluster,
                              const EngineConfig& config, SizeCache* cache) {
  if (cluster.window().empty()) throw DegenerateInputError("distance to an empty cluster");
  double best = 0.0;
  bool first = true;
  for (const auto& member : cluster.window()) {
    const double d = pair_distance(tweet.normalized, member.normalized, config.compressor, cache);
    if (first || d > best) best = d;
    first = false;
  }
  return best;
}

double cluster_pair_distance(const Cluster& a, const Cluster& b, const EngineConfig& config,
                             SizeCache* cache) {
  if (a.window().empty() || b.window().empty()) {
    throw DegenerateInputError("distance between empty clusters");
  }
  double best = 0.0;
  bool first = true;
  for (const auto& x : a.window()) {
    for (const auto& y : b.window()) {
      const double d = pair_distance(x.normalized, y.normalized, config.compressor, cache);
      if (first || d > best) best = d;
      first = false;
    }
  }
  return best;
}

std::vector<std::string> top_keywords(const std::unordered_map<std::string, std::uint32_t>& counts,
                                      std::size_t n, const Stoplist& stoplist) {
  std::vector<std::pair<std::string_view, std::uint32_t>> terms;
  terms.reserve(counts.size());
  for (const auto& [token, count] : counts) {
    if (count > 0 && !stoplist.contains(token)) terms.emplace_back(token, count);
  }
  const std::size_t keep = std::min(n, terms.size());
  std::partial_sort(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(keep), terms.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  std::vector<std::string> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.emplace_back(terms[i].first);
  return out;
}

std::vector<std::string> top_keywords(const Cluster& cluster, std::size_t n,
                                      const Stoplist& stoplist) {
  return top_keywords(cluster.token_counts(), n, stoplist);
}

}  // namespace evdet
