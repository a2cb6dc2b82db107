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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evdet/errors.hpp"
#include "evdet/model.hpp"

namespace evdet {

// One line of the stream format: {"id":..,"user":..,"ts":..,"text":..}.
struct StreamRecord {
  std::string id;
  std::string user;
  Timestamp ts = 0;
  std::string text;

  friend bool operator==(const StreamRecord&, const StreamRecord&) = default;
};

// Structural parse only. Throws ParseError for invalid JSON, a non-object, a
// missing or extra key, or a wrongly typed field.
StreamRecord parse_stream_line(std::string_view line, std::size_t line_number = 0);

// Compact single-line object with keys in id, user, ts, text order.
std::string serialize_record(const StreamRecord& record);

// Parses and validates one line into a Tweet. Text longer than 140 code
// points is cut and `truncated` set. Throws ParseError on any failure.
Tweet parse_record(std::string_view line, std::size_t line_number = 0,
                   const Stoplist& stoplist = Stoplist::builtin(), bool* truncated = nullptr);

struct ReaderStats {
  std::uint64_t lines = 0;
  std::uint64_t skipped = 0;  // blank and '#' lines
  std::uint64_t parsed = 0;
  std::uint64_t rejected = 0;
  std::uint64_t truncated = 0;
};

// Pulls valid tweets from a line stream. Bad lines are counted and their
// errors kept (up to a cap) while reading continues.
class StreamReader {
 public:
  explicit StreamReader(std::istream& in, const Stoplist& stoplist = Stoplist::builtin());

  std::optional<Tweet> next();

  const ReaderStats& stats() const noexcept { return stats_; }
  const std::vector<ParseError>& errors() const noexcept { return errors_; }

  static constexpr std::size_t kMaxKeptErrors = 100;

 private:
  std::istream& in_;
  const Stoplist& stoplist_;
  ReaderStats stats_;
  std::vector<ParseError> errors_;
  std::string line_;
};

struct TruthEvent {
  std::string event_id;
  Timestamp start_ts = 0;
  Timestamp end_ts = 0;
  std::vector<std::string> members;

  friend bool operator==(const TruthEvent&, const TruthEvent&) = default;
};

using GroundTruth = std::vector<TruthEvent>;

// `event_id start_ts end_ts id1,id2,...`, one event per line.
void write_ground_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth read_ground_truth(std::istream& in);

}  // namespace evdet
