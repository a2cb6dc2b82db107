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

#include "evdet/compression.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <stdexcept>

#include "evdet/errors.hpp"

namespace evdet {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kDeflateRaw:
      return "deflate-raw";
    case Algorithm::kGzip:
      return "gzip";
    case Algorithm::kLzFast:
      return "lz-fast";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "deflate-raw" || name == "deflate") return Algorithm::kDeflateRaw;
  if (name == "gzip") return Algorithm::kGzip;
  if (name == "lz-fast") return Algorithm::kLzFast;
  throw ConfigError("unknown compression algorithm '" + std::string(name) + "'");
}

bool is_available(Algorithm algorithm) {
  return algorithm == Algorithm::kDeflateRaw || algorithm == Algorithm::kGzip;
}

std::vector<Algorithm> available_algorithms() {
  return {Algorithm::kDeflateRaw, Algorithm::kGzip};
}

void validate(const CompressorSpec& spec) {
  if (!is_available(spec.algorithm)) {
    throw ConfigError("compression algorithm '" + std::string(to_string(spec.algorithm)) +
                      "' is not built");
  }
  if (spec.level < 0 || spec.level > 9) {
    throw ConfigError("compression level " + std::to_string(spec.level) +
                      " outside [0, 9]");
  }
  if (!spec.deterministic) {
    throw ConfigError("the engine requires a deterministic compressor");
  }
}

struct Compressor::Stream {
  z_stream z{};
  std::array<Bytef, 4096> scratch{};
};

Compressor::Compressor(const CompressorSpec& spec) : spec_(spec), stream_(std::make_unique<Stream>()) {
  validate(spec_);
  const int window_bits = spec_.algorithm == Algorithm::kGzip ? 15 + 16 : -15;
  if (deflateInit2(&stream_->z, spec_.level, Z_DEFLATED, window_bits, 8, Z_DEFAULT_STRATEGY) !=
      Z_OK) {
    throw std::runtime_error("deflateInit2 failed");
  }
}

Compressor::~Compressor() { deflateEnd(&stream_->z); }

std::size_t Compressor::run(std::span<const std::string_view> parts) {
  z_stream& z = stream_->z;
  deflateReset(&z);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const bool last = i + 1 == parts.size();
    // zlib never writes through next_in.
    z.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(parts[i].data()));
    z.avail_in = static_cast<uInt>(parts[i].size());
    const int flush = last ? Z_FINISH : Z_NO_FLUSH;
    for (;;) {
      z.next_out = stream_->scratch.data();
      z.avail_out = static_cast<uInt>(stream_->scratch.size());
      const int rc = deflate(&z, flush);
      if (rc == Z_STREAM_ERROR) throw std::runtime_error("deflate failed");
      if (last) {
        if (rc == Z_STREAM_END) break;
      } else if (z.avail_in == 0 && z.avail_out != 0) {
        break;
      }
    }
  }
  return static_cast<std::size_t>(z.total_out);
}

std::size_t Compressor::compressed_size(std::string_view text) {
  if (text.empty()) throw DegenerateInputError("compressed size of empty text");
  const std::array<std::string_view, 1> parts{text};
  return run(parts);
}

std::size_t Compressor::compressed_size(std::string_view first, std::string_view second) {
  if (first.empty() || second.empty()) {
    throw DegenerateInputError("compression distance over empty text");
  }
  const std::array<std::string_view, 2> parts{first, second};
  return run(parts);
}

double Compressor::distance(std::string_view x, std::size_t x_size, std::string_view y,
                            std::size_t y_size) {
  const std::size_t joint = compressed_size(x, y);
  return static_cast<double>(joint) / static_cast<double>(x_size + y_size);
}

Compressor& thread_compressor(const CompressorSpec& spec) {
  thread_local std::map<std::pair<Algorithm, int>, std::unique_ptr<Compressor>> pool;
  auto& slot = pool[{spec.algorithm, spec.level}];
  if (!slot) slot = std::make_unique<Compressor>(spec);
  return *slot;
}

std::size_t compressed_size(std::string_view text, const CompressorSpec& spec) {
  return thread_compressor(spec).compressed_size(text);
}

SizeCache::SizeCache(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

std::string SizeCache::make_key(std::string_view text, const CompressorSpec& spec) {
  std::string key;
  key.reserve(text.size() + 2);
  key.push_back(static_cast<char>(spec.algorithm));
  key.push_back(static_cast<char>(spec.level));
  key.append(text);
  return key;
}

std::optional<std::size_t> SizeCache::find(std::string_view text,
                                           const CompressorSpec& spec) const {
  const std::string key = make_key(text, spec);
  std::lock_guard lock(mu_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  lru_.splice(lru_.begin(), lru_, it->second);
  return it->second->second;
}

std::size_t SizeCache::get_or_compute(std::string_view text, const CompressorSpec& spec) {
  std::string key = make_key(text, spec);
  {
    std::lock_guard lock(mu_);
    auto it = index_.find(key);
    if (it != index_.end()) {
      ++hits_;
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    ++misses_;
  }
  const std::size_t size = compressed_size(text, spec);
  std::lock_guard lock(mu_);
  if (index_.find(key) != index_.end()) return size;
  lru_.emplace_front(std::move(key), size);
  index_.emplace(lru_.front().first, lru_.begin());
  while (lru_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
  return size;
}

std::size_t SizeCache::size() const {
  std::lock_guard lock(mu_);
  return lru_.size();
}

std::uint64_t SizeCache::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

std::uint64_t SizeCache::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

void SizeCache::clear() {
  std::lock_guard lock(mu_);
  index_.clear();
  lru_.clear();
}

double pair_distance(std::string_view x, std::string_view y, const CompressorSpec& spec,
                     SizeCache* cache) {
  if (x.empty() || y.empty()) throw DegenerateInputError("compression distance over empty text");
  Compressor& compressor = thread_compressor(spec);
  const std::size_t cx = cache ? cache->get_or_compute(x, spec) : compressor.compressed_size(x);
  const std::size_t cy = cache ? cache->get_or_compute(y, spec) : compressor.compressed_size(y);
  return compressor.distance(x, cx, y, cy);
}

BenchReport compressor_benchmark(std::span<const std::string> corpus,
                                 std::span<const CompressorSpec> specs) {
  if (corpus.empty()) throw std::invalid_argument("benchmark corpus is empty");
  if (specs.empty()) throw std::invalid_argument("no compressor specs to benchmark");
  for (const auto& spec : specs) validate(spec);

  BenchReport report;
  for (const auto& spec : specs) {
    Compressor compressor(spec);
    double ratio_sum = 0.0;
    std::size_t counted = 0;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& text : corpus) {
      if (text.empty()) continue;
      ratio_sum += static_cast<double>(compressor.compressed_size(text)) /
                   static_cast<double>(text.size());
      ++counted;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    if (counted == 0) throw std::invalid_argument("benchmark corpus has only empty texts");
    BenchRow row;
    row.spec = spec;
    row.corpus_size = corpus.size();
    row.mean_ratio = ratio_sum / static_cast<double>(counted);
    // Sub-resolution timings are clamped to one nanosecond.
    row.texts_per_sec = static_cast<double>(counted) / std::max(elapsed.count(), 1e-9);
    report.rows.push_back(row);
  }
  return report;
}

std::string format_bench_report(const BenchReport& report) {
  std::ostringstream out;
  out << "algorithm level mean_ratio texts_per_sec\n";
  out.setf(std::ios::fixed);
  for (const auto& row : report.rows) {
    out.precision(4);
    out << to_string(row.spec.algorithm) << ' ' << row.spec.level << ' ' << row.mean_ratio << ' ';
    out.precision(1);
    out << row.texts_per_sec << '\n';
  }
  return out.str();
}

}  // namespace evdet
