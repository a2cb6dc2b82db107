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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace evdet {

enum class Algorithm : std::uint8_t {
  kDeflateRaw,  // always built
  kGzip,
  kLzFast,  // optional; not built in this configuration
};

std::string_view to_string(Algorithm algorithm);

// Accepts "deflate-raw", "gzip", "lz-fast". Throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view name);

bool is_available(Algorithm algorithm);
std::vector<Algorithm> available_algorithms();

struct CompressorSpec {
  Algorithm algorithm = Algorithm::kDeflateRaw;
  int level = 9;  // best compression
  bool deterministic = true;

  friend bool operator==(const CompressorSpec&, const CompressorSpec&) = default;
};

// Throws ConfigError for an unbuilt algorithm, an out-of-range level, or a
// non-deterministic spec.
void validate(const CompressorSpec& spec);

// Reusable compression context. Computes output sizes only; the compressed
// bytes are streamed into a scratch buffer and discarded. Not thread-safe:
// use one instance per thread.
class Compressor {
 public:
  explicit Compressor(const CompressorSpec& spec);
  ~Compressor();
  Compressor(const Compressor&) = delete;
  Compressor& operator=(const Compressor&) = delete;

  const CompressorSpec& spec() const noexcept { return spec_; }

  // C(x). Throws DegenerateInputError on empty input.
  std::size_t compressed_size(std::string_view text);

  // C(xy) without materializing the concatenation. Feeding the two halves
  // without an intermediate flush yields the same stream as compressing the
  // joined buffer.
  std::size_t compressed_size(std::string_view first, std::string_view second);

  // C(xy) / (C(x) + C(y)) with the single-text sizes supplied by the caller.
  double distance(std::string_view x, std::size_t x_size, std::string_view y,
                  std::size_t y_size);

 private:
  std::size_t run(std::span<const std::string_view> parts);

  CompressorSpec spec_;
  struct Stream;
  std::unique_ptr<Stream> stream_;
};

// A per-thread Compressor for `spec`, created on first use.
Compressor& thread_compressor(const CompressorSpec& spec);

std::size_t compressed_size(std::string_view text, const CompressorSpec& spec);

// Bounded LRU map from text to C(text). Safe for concurrent use. Entries are
// keyed by (spec, text), so one cache may serve several specs.
class SizeCache {
 public:
  explicit SizeCache(std::size_t capacity = 1 << 16);

  std::size_t get_or_compute(std::string_view text, const CompressorSpec& spec);
  std::optional<std::size_t> find(std::string_view text, const CompressorSpec& spec) const;

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const;
  std::uint64_t hits() const;
  std::uint64_t misses() const;
  void clear();

 private:
  static std::string make_key(std::string_view text, const CompressorSpec& spec);

  std::size_t capacity_;
  mutable std::mutex mu_;
  mutable std::list<std::pair<std::string, std::size_t>> lru_;
  std::unordered_map<std::string_view, decltype(lru_)::iterator> index_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

// D(x, y) = C(xy) / (C(x) + C(y)). The concatenation is always x then y.
// Throws DegenerateInputError if either operand is empty.
double pair_distance(std::string_view x, std::string_view y, const CompressorSpec& spec,
                     SizeCache* cache = nullptr);

struct BenchRow {
  CompressorSpec spec;
  std::size_t corpus_size = 0;
  double mean_ratio = 0.0;
  double texts_per_sec = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

// Compresses every text alone under each spec and reports the mean
// compressed/original ratio and throughput. Throws std::invalid_argument on
// an empty corpus or empty spec list; ConfigError on an unavailable spec.
BenchReport compressor_benchmark(std::span<const std::string> corpus,
                                 std::span<const CompressorSpec> specs);

// `algorithm level mean_ratio texts_per_sec`, header line first.
std::string format_bench_report(const BenchReport& report);

}  // namespace evdet
