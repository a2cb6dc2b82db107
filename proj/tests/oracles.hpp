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

// Independent reference computations used by the unit and acceptance suites.
// Nothing here calls into the code paths it is used to check.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace evdet::oracle {

// H = -sum p log2 p summed term by term in natural log, then converted.
inline double entropy_bits(const std::vector<std::uint64_t>& counts) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h += -p * std::log(p);
  }
  return h / std::log(2.0);
}

// Exponential log-likelihood sum(log lambda - x_i lambda).
inline double exp_log_likelihood(const std::vector<double>& gaps, double lambda) {
  double ll = 0.0;
  for (double x : gaps) ll += std::log(lambda) - x * lambda;
  return ll;
}

struct GridArgmax {
  double lambda = 0.0;
  double log_likelihood = -std::numeric_limits<double>::infinity();
};

// Best lambda on `points` evenly spaced values in [lo, hi].
inline GridArgmax exp_mle_grid(const std::vector<double>& gaps, double lo, double hi,
                               std::size_t points) {
  GridArgmax best;
  for (std::size_t i = 0; i < points; ++i) {
    const double lambda = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double ll = exp_log_likelihood(gaps, lambda);
    if (ll > best.log_likelihood) best = {lambda, ll};
  }
  return best;
}

// Every set partition of {0..n-1} as a block label per element (restricted
// growth strings).
inline void for_each_partition(std::size_t n,
                               const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> labels(n, 0);
  std::function<void(std::size_t, std::size_t)> recurse = [&](std::size_t i, std::size_t blocks) {
    if (i == n) {
      visit(labels);
      return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
      labels[i] = b;
      recurse(i + 1, std::max(blocks, b + 1));
    }
  };
  if (n == 0) return;
  labels[0] = 0;
  recurse(1, 1);
}

inline std::string random_bytes(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::string s(n, '\0');
  for (auto& c : s) c = static_cast<char>(byte(rng));
  return s;
}

// Tweet-like text: words from a fixed English pool until `length` bytes.
inline std::string random_tweet(std::size_t length, std::mt19937_64& rng) {
  static const char* kWords[] = {
      "earthquake", "felt",    "just",    "now",     "in",      "the",     "city",    "buildings",
      "shaking",    "people",  "running", "outside", "magnitude", "news",  "report",  "tsunami",
      "warning",    "coast",   "omg",     "lol",     "pray",    "for",     "everyone", "safe",
      "school",     "closed",  "traffic", "jam",     "downtown", "game",   "tonight", "watch",
      "music",      "festival", "love",   "this",    "song",    "vote",    "election", "results",
      "fraud",      "count",   "marathon", "finish", "line",    "explosion", "help",  "police"};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kWords) - 1);
  std::string s;
  while (s.size() < length) {
    if (!s.empty()) s.push_back(' ');
    s += kWords[pick(rng)];
  }
  s.resize(length);
  if (s.back() == ' ') s.back() = 'x';
  return s;
}

}  // namespace evdet::oracle
