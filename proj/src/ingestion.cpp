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

#include "evdet/ingestion.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace evdet {
namespace {

const std::string& require_string(const nlohmann::json& object, const char* key,
                                  std::size_t line_number) {
  auto it = object.find(key);
  if (it == object.end()) throw ParseError(line_number, std::string("missing field '") + key + "'");
  if (!it->is_string()) {
    throw ParseError(line_number, std::string("field '") + key + "' is not a string");
  }
  return it->get_ref<const std::string&>();
}

}  // namespace

StreamRecord parse_stream_line(std::string_view line, std::size_t line_number) {
  nlohmann::json object = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (object.is_discarded()) throw ParseError(line_number, "malformed record");
  if (!object.is_object()) throw ParseError(line_number, "record is not an object");
  for (const auto& item : object.items()) {
    const auto& key = item.key();
    if (key != "id" && key != "user" && key != "ts" && key != "text") {
      throw ParseError(line_number, "unexpected field '" + key + "'");
    }
  }

  StreamRecord record;
  record.id = require_string(object, "id", line_number);
  record.user = require_string(object, "user", line_number);
  record.text = require_string(object, "text", line_number);
  auto ts = object.find("ts");
  if (ts == object.end()) throw ParseError(line_number, "missing field 'ts'");
  if (ts->is_number_unsigned()) {
    record.ts = static_cast<Timestamp>(ts->get<std::uint64_t>());
  } else if (ts->is_number_integer()) {
    record.ts = ts->get<std::int64_t>();
  } else {
    throw ParseError(line_number, "field 'ts' is not an integer");
  }
  return record;
}

std::string serialize_record(const StreamRecord& record) {
  nlohmann::ordered_json object;
  object["id"] = record.id;
  object["user"] = record.user;
  object["ts"] = record.ts;
  object["text"] = record.text;
  return object.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

Tweet parse_record(std::string_view line, std::size_t line_number, const Stoplist& stoplist,
                   bool* truncated) {
  StreamRecord record = parse_stream_line(line, line_number);
  const bool cut = truncate_code_points(record.text, kMaxTweetCodePoints);
  if (truncated) *truncated = cut;
  try {
    return make_tweet(std::move(record.id), std::move(record.user), record.ts,
                      std::move(record.text), stoplist);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_number, e.what());
  }
}

StreamReader::StreamReader(std::istream& in, const Stoplist& stoplist)
    : in_(in), stoplist_(stoplist) {}

std::optional<Tweet> StreamReader::next() {
  while (std::getline(in_, line_)) {
    ++stats_.lines;
    const std::string_view view = trim(line_);
    if (view.empty() || view.front() == '#') {
      ++stats_.skipped;
      continue;
    }
    try {
      bool cut = false;
      Tweet tweet = parse_record(view, stats_.lines, stoplist_, &cut);
      ++stats_.parsed;
      if (cut) ++stats_.truncated;
      return tweet;
    } catch (const ParseError& e) {
      ++stats_.rejected;
      if (errors_.size() < kMaxKeptErrors) errors_.push_back(e);
    }
  }
  return std::nullopt;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  for (const auto& event : truth) {
    out << event.event_id << ' ' << event.start_ts << ' ' << event.end_ts << ' ';
    for (std::size_t i = 0; i < event.members.size(); ++i) {
      if (i) out << ',';
      out << event.members[i];
    }
    out << '\n';
  }
}

GroundTruth read_ground_truth(std::istream& in) {
  GroundTruth truth;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::istringstream fields{std::string(view)};
    TruthEvent event;
    std::string members;
    if (!(fields >> event.event_id >> event.start_ts >> event.end_ts)) {
      throw ParseError(line_number, "expected 'event_id start_ts end_ts members'");
    }
    fields >> members;
    std::string extra;
    if (fields >> extra) throw ParseError(line_number, "trailing data after member list");
    std::size_t pos = 0;
    while (pos < members.size()) {
      std::size_t comma = members.find(',', pos);
      if (comma == std::string::npos) comma = members.size();
      if (comma > pos) event.members.push_back(members.substr(pos, comma - pos));
      pos = comma + 1;
    }
    truth.push_back(std::move(event));
  }
  return truth;
}

}  // namespace evdet
