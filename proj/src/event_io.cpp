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

#include "evdet/event_io.hpp"

#include <istream>
#include <ostream>

#include "evdet/errors.hpp"
#include "json.hpp"

namespace evdet {

std::string event_to_line(const Event& event) {
  nlohmann::ordered_json o;
  o["type"] = event.closed_at ? "closed" : "promotion";
  o["event_id"] = event.event_id;
  o["cluster_id"] = event.cluster_id;
  o["first_tweet"] = {{"id", event.first_tweet.id},
                      {"ts", event.first_tweet.timestamp},
                      {"text", event.first_tweet.text}};
  o["keywords"] = event.keywords;
  o["tweet_count"] = event.tweet_count;
  o["unique_users"] = event.unique_users;
  o["diversity_at_promotion"] = event.diversity_at_promotion;
  o["promoted_at"] = event.promoted_at;
  if (event.closed_at) {
    o["closed_at"] = *event.closed_at;
    o["members"] = event.member_ids;
  }
  return o.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void JsonLinesSink::on_promotion(const Event& event) {
  out_ << event_to_line(event) << '\n';
  ++promotions_;
}

void JsonLinesSink::on_closed(const Event& event) {
  out_ << event_to_line(event) << '\n';
  ++closures_;
}

std::vector<DetectedEvent> read_detected_events(std::istream& in) {
  std::vector<DetectedEvent> events;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const auto o = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (o.is_discarded() || !o.is_object()) throw ParseError(line_number, "malformed event record");
    const auto type = o.find("type");
    if (type == o.end() || !type->is_string()) throw ParseError(line_number, "missing 'type'");
    if (*type != "closed") continue;
    try {
      DetectedEvent event;
      const auto& id = o.at("event_id");
      event.event_id = id.is_string() ? id.get<std::string>() : id.dump();
      event.members = o.at("members").get<std::vector<std::string>>();
      events.push_back(std::move(event));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_number, std::string("bad closed event: ") + e.what());
    }
  }
  return events;
}

}  // namespace evdet
