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

#include <iosfwd>
#include <string>
#include <vector>

#include "evdet/engine.hpp"

namespace evdet {

// A detected event as read back from an events file.
struct DetectedEvent {
  std::string event_id;
  std::vector<std::string> members;
};

// One JSON object per line:
//   {"type":"promotion", event fields...}
//   {"type":"closed", event fields..., "closed_at":..., "members":[...]}
std::string event_to_line(const Event& event);

// Streams every notice to `out` as it happens.
class JsonLinesSink : public EventSink {
 public:
  explicit JsonLinesSink(std::ostream& out) : out_(out) {}
  void on_promotion(const Event& event) override;
  void on_closed(const Event& event) override;

  std::uint64_t promotions() const noexcept { return promotions_; }
  std::uint64_t closures() const noexcept { return closures_; }

 private:
  std::ostream& out_;
  std::uint64_t promotions_ = 0;
  std::uint64_t closures_ = 0;
};

// Collects notices in memory.
class CollectingSink : public EventSink {
 public:
  void on_promotion(const Event& event) override { promotions.push_back(event); }
  void on_closed(const Event& event) override { closed.push_back(event); }

  std::vector<Event> promotions;
  std::vector<Event> closed;
};

// Closed-event records of an events file. Promotion lines are skipped.
// Throws ParseError on a malformed line.
std::vector<DetectedEvent> read_detected_events(std::istream& in);

}  // namespace evdet
