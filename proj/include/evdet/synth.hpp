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
#include <string>
#include <string_view>
#include <vector>

#include "evdet/ingestion.hpp"

namespace evdet {

// An event planted in a synthetic stream. Tweets are paraphrases of the
// phrase pool posted by exactly `unique_users` distinct users.
struct PlantedEvent {
  std::string event_id;
  Timestamp start_ts = 0;
  Timestamp duration_s = 0;
  std::uint64_t tweet_count = 1;
  std::uint64_t unique_users = 1;
  std::vector<std::string> phrases;
  double noise_rate = 0.0;  // per-token probability of a swap, drop or typo
};

// One user repeatedly posting near-duplicates. Never part of the truth.
struct FanFixture {
  std::string user;
  Timestamp start_ts = 0;
  Timestamp duration_s = 0;
  std::uint64_t tweet_count = 1;
  std::vector<std::string> phrases;
  double noise_rate = 0.0;
};

// Random-vocabulary chatter spread uniformly over [start_ts, start_ts + duration_s].
struct Background {
  double rate = 0.0;  // tweets per second
  Timestamp start_ts = 0;
  Timestamp duration_s = 0;
  std::uint64_t vocabulary_size = 5000;
  std::uint64_t user_population = 10000;
  double skew = 1.0;  // Zipf exponent over users
  std::size_t min_chars = 40;
  std::size_t max_chars = 140;
};

struct SyntheticSpec {
  std::vector<PlantedEvent> events;
  std::vector<FanFixture> fans;
  Background background;
  std::uint64_t seed = 0;
};

// Throws ConfigError naming the first invalid field.
void validate(const SyntheticSpec& spec);

// Reads the JSON spec format (see fixtures/). Throws ConfigError.
SyntheticSpec parse_synthetic_spec(std::string_view json_text);
SyntheticSpec load_synthetic_spec(const std::string& path);

struct SyntheticStream {
  std::vector<StreamRecord> records;  // non-decreasing ts
  GroundTruth truth;
};

// Deterministic for a given spec (seed included).
SyntheticStream generate_stream(const SyntheticSpec& spec);

// Token-level paraphrase: each token is swapped with its successor, dropped,
// or given a one-character typo with probability `rate`. Never returns an
// empty string for non-blank input.
template <typename Rng>
std::string paraphrase(std::string_view phrase, double rate, Rng& rng);

}  // namespace evdet

#include "evdet/detail/paraphrase.hpp"
