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

#include "evdet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace evdet {
namespace {

using nlohmann::json;

void check_window(const std::string& where, Timestamp start, Timestamp duration) {
  if (start < 0) throw ConfigError(where + ".start_ts must be >= 0");
  if (duration < 0) throw ConfigError(where + ".duration_s must be >= 0");
}

void check_rate(const std::string& field, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw ConfigError(field + " must be >= 0");
}

void check_phrases(const std::string& where, const std::vector<std::string>& phrases) {
  if (phrases.empty()) throw ConfigError(where + ".phrases must not be empty");
  for (const auto& p : phrases) {
    if (trim(p).empty()) throw ConfigError(where + ".phrases contains a blank phrase");
  }
}

template <typename T>
T field(const json& object, const std::string& where, const char* key, T fallback) {
  auto it = object.find(key);
  if (it == object.end()) return fallback;
  try {
    if constexpr (std::is_unsigned_v<T>) {
      // Let negative values through as signed so validation can name them.
      if (it->is_number_integer() && it->get<std::int64_t>() < 0) {
        throw ConfigError(where + "." + key + " must be >= 0");
      }
    }
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

std::vector<std::string> make_vocabulary(std::size_t size, std::mt19937_64& rng) {
  // Letters drawn with English frequencies (per mille), lengths 2..9.
  static constexpr std::string_view kLetters = "etaoinshrdlcumwfgypbvkjxqz";
  static constexpr double kWeights[] = {127, 91, 82, 75, 70, 67, 63, 61, 60, 43, 40, 28, 28,
                                        24,  24, 22, 20, 20, 19, 15, 10, 8,  2,  2,  1,  1};
  std::discrete_distribution<std::size_t> letter(std::begin(kWeights), std::end(kWeights));
  std::uniform_int_distribution<int> length(2, 9);
  std::set<std::string> seen;
  std::vector<std::string> words;
  words.reserve(size);
  while (words.size() < size) {
    std::string word;
    for (int n = length(rng); n > 0; --n) word.push_back(kLetters[letter(rng)]);
    if (seen.insert(word).second) words.push_back(std::move(word));
  }
  return words;
}

std::discrete_distribution<std::size_t> zipf(std::size_t n, double exponent) {
  std::vector<double> weights(n);
  for (std::size_t r = 0; r < n; ++r) weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
  return {weights.begin(), weights.end()};
}

struct Draft {
  Timestamp ts;
  std::size_t order;
  std::string user;
  std::string text;
  std::ptrdiff_t event = -1;  // index into spec.events, -1 for noise
};

std::vector<Timestamp> uniform_times(Timestamp start, Timestamp duration, std::uint64_t count,
                                     std::mt19937_64& rng) {
  std::uniform_int_distribution<Timestamp> offset(0, duration);
  std::vector<Timestamp> times(count);
  for (auto& t : times) t = start + offset(rng);
  std::sort(times.begin(), times.end());
  return times;
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    const auto& e = spec.events[i];
    const std::string where = "events[" + std::to_string(i) + "]";
    if (e.event_id.empty() || e.event_id.find_first_of(" \t\n,") != std::string::npos) {
      throw ConfigError(where + ".event_id must be non-empty without spaces or commas");
    }
    if (!ids.insert(e.event_id).second) throw ConfigError(where + ".event_id is duplicated");
    check_window(where, e.start_ts, e.duration_s);
    if (e.tweet_count < 1) throw ConfigError(where + ".tweet_count must be >= 1");
    if (e.unique_users < 1) throw ConfigError(where + ".unique_users must be >= 1");
    if (e.unique_users > e.tweet_count) {
      throw ConfigError(where + ".unique_users must not exceed tweet_count");
    }
    check_rate(where + ".noise_rate", e.noise_rate);
    check_phrases(where, e.phrases);
  }
  for (std::size_t i = 0; i < spec.fans.size(); ++i) {
    const auto& f = spec.fans[i];
    const std::string where = "fans[" + std::to_string(i) + "]";
    if (f.user.empty()) throw ConfigError(where + ".user must not be empty");
    check_window(where, f.start_ts, f.duration_s);
    if (f.tweet_count < 1) throw ConfigError(where + ".tweet_count must be >= 1");
    check_rate(where + ".noise_rate", f.noise_rate);
    check_phrases(where, f.phrases);
  }
  const auto& b = spec.background;
  check_rate("background.rate", b.rate);
  check_window("background", b.start_ts, b.duration_s);
  check_rate("background.skew", b.skew);
  if (b.rate > 0.0) {
    if (b.vocabulary_size < 1) throw ConfigError("background.vocabulary_size must be >= 1");
    if (b.user_population < 1) throw ConfigError("background.user_population must be >= 1");
  }
  if (b.min_chars < 1 || b.min_chars > b.max_chars || b.max_chars > kMaxTweetCodePoints) {
    throw ConfigError("background.min_chars/max_chars must satisfy 1 <= min <= max <= 140");
  }
}

SyntheticSpec parse_synthetic_spec(std::string_view json_text) {
  const json root = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded() || !root.is_object()) throw ConfigError("spec is not a JSON object");

  auto number = [](const json& o, const std::string& where, const char* key, double fallback) {
    auto value = field<double>(o, where, key, fallback);
    return value;
  };
  auto integer = [](const json& o, const std::string& where, const char* key, Timestamp fallback) {
    return field<Timestamp>(o, where, key, fallback);
  };

  SyntheticSpec spec;
  spec.seed = field<std::uint64_t>(root, "spec", "seed", 0);
  if (auto it = root.find("events"); it != root.end()) {
    if (!it->is_array()) throw ConfigError("events must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& o = (*it)[i];
      const std::string where = "events[" + std::to_string(i) + "]";
      PlantedEvent e;
      e.event_id = field<std::string>(o, where, "event_id", "");
      e.start_ts = integer(o, where, "start_ts", 0);
      e.duration_s = integer(o, where, "duration_s", 0);
      e.tweet_count = field<std::uint64_t>(o, where, "tweet_count", 1);
      e.unique_users = field<std::uint64_t>(o, where, "unique_users", 1);
      e.phrases = field<std::vector<std::string>>(o, where, "phrases", {});
      e.noise_rate = number(o, where, "noise_rate", 0.0);
      spec.events.push_back(std::move(e));
    }
  }
  if (auto it = root.find("fans"); it != root.end()) {
    if (!it->is_array()) throw ConfigError("fans must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& o = (*it)[i];
      const std::string where = "fans[" + std::to_string(i) + "]";
      FanFixture f;
      f.user = field<std::string>(o, where, "user", "");
      f.start_ts = integer(o, where, "start_ts", 0);
      f.duration_s = integer(o, where, "duration_s", 0);
      f.tweet_count = field<std::uint64_t>(o, where, "tweet_count", 1);
      f.phrases = field<std::vector<std::string>>(o, where, "phrases", {});
      f.noise_rate = number(o, where, "noise_rate", 0.0);
      spec.fans.push_back(std::move(f));
    }
  }
  if (auto it = root.find("background"); it != root.end()) {
    const json& o = *it;
    Background& b = spec.background;
    b.rate = number(o, "background", "rate", 0.0);
    b.start_ts = integer(o, "background", "start_ts", 0);
    b.duration_s = integer(o, "background", "duration_s", 0);
    b.vocabulary_size = field<std::uint64_t>(o, "background", "vocabulary_size", b.vocabulary_size);
    b.user_population = field<std::uint64_t>(o, "background", "user_population", b.user_population);
    b.skew = number(o, "background", "skew", b.skew);
    b.min_chars = field<std::size_t>(o, "background", "min_chars", b.min_chars);
    b.max_chars = field<std::size_t>(o, "background", "max_chars", b.max_chars);
  }
  validate(spec);
  return spec;
}

SyntheticSpec load_synthetic_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open spec '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_synthetic_spec(buf.str());
}

SyntheticStream generate_stream(const SyntheticSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::vector<Draft> drafts;
  std::size_t order = 0;

  for (std::size_t e = 0; e < spec.events.size(); ++e) {
    const auto& event = spec.events[e];
    // Every one of the unique_users posts at least once; the rest are random.
    std::vector<std::size_t> authors(event.tweet_count);
    std::uniform_int_distribution<std::size_t> any_user(0, event.unique_users - 1);
    for (std::size_t i = 0; i < authors.size(); ++i) {
      authors[i] = i < event.unique_users ? i : any_user(rng);
    }
    std::shuffle(authors.begin(), authors.end(), rng);
    std::uniform_int_distribution<std::size_t> pick(0, event.phrases.size() - 1);
    const auto times = uniform_times(event.start_ts, event.duration_s, event.tweet_count, rng);
    for (std::size_t i = 0; i < times.size(); ++i) {
      drafts.push_back({times[i], order++, event.event_id + "-u" + std::to_string(authors[i]),
                        paraphrase(event.phrases[pick(rng)], event.noise_rate, rng),
                        static_cast<std::ptrdiff_t>(e)});
    }
  }

  for (const auto& fan : spec.fans) {
    std::uniform_int_distribution<std::size_t> pick(0, fan.phrases.size() - 1);
    for (Timestamp ts : uniform_times(fan.start_ts, fan.duration_s, fan.tweet_count, rng)) {
      drafts.push_back({ts, order++, fan.user,
                        paraphrase(fan.phrases[pick(rng)], fan.noise_rate, rng), -1});
    }
  }

  const auto& bg = spec.background;
  const auto noise_count = static_cast<std::uint64_t>(
      std::llround(bg.rate * static_cast<double>(bg.duration_s)));
  if (noise_count > 0) {
    const auto vocabulary = make_vocabulary(bg.vocabulary_size, rng);
    auto word = zipf(vocabulary.size(), 1.0);
    auto user = zipf(bg.user_population, bg.skew);
    std::uniform_int_distribution<std::size_t> length(bg.min_chars, bg.max_chars);
    for (Timestamp ts : uniform_times(bg.start_ts, bg.duration_s, noise_count, rng)) {
      const std::size_t target = length(rng);
      // Words until the target length, cutting the last one so lengths are exact.
      std::string text;
      while (text.size() < target) {
        if (!text.empty()) text.push_back(' ');
        text += vocabulary[word(rng)];
      }
      text.resize(target);
      if (text.back() == ' ') text.back() = 'e';
      drafts.push_back({ts, order++, "user" + std::to_string(user(rng) + 1), std::move(text), -1});
    }
  }

  std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    return a.ts != b.ts ? a.ts < b.ts : a.order < b.order;
  });

  SyntheticStream stream;
  stream.records.reserve(drafts.size());
  stream.truth.resize(spec.events.size());
  for (std::size_t e = 0; e < spec.events.size(); ++e) {
    const auto& event = spec.events[e];
    stream.truth[e].event_id = event.event_id;
    stream.truth[e].start_ts = event.start_ts;
    stream.truth[e].end_ts = event.start_ts + event.duration_s;
  }
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    auto& d = drafts[i];
    std::string id = std::to_string(i + 1);
    if (d.event >= 0) stream.truth[static_cast<std::size_t>(d.event)].members.push_back(id);
    stream.records.push_back({std::move(id), std::move(d.user), d.ts, std::move(d.text)});
  }
  return stream;
}

}  // namespace evdet
