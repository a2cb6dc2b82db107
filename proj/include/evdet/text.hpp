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
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace evdet {

// Set of tokens excluded from keywords and candidate retrieval.
class Stoplist {
 public:
  Stoplist() = default;

  // One token per line; '#'-prefixed lines and blank lines are ignored.
  // Entries are normalized the same way as tweet text.
  static Stoplist from_text(std::string_view text);
  static Stoplist load(const std::string& path);
  // The multilingual list shipped in data/stoplist.txt.
  static const Stoplist& builtin();

  bool contains(std::string_view token) const;
  std::size_t size() const noexcept { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// NFC-normalized, lowercased UTF-8. Invalid sequences become U+FFFD.
std::string normalize_text(std::string_view text);

// Splits normalized text into tokens: maximal runs of letters, digits and
// combining marks, optionally prefixed by a single '#' or '@'. Tokens shorter
// than two code points and stoplisted tokens are dropped. Order and
// duplicates are preserved.
std::vector<std::string> tokenize(std::string_view normalized, const Stoplist& stoplist);

std::size_t count_code_points(std::string_view utf8);

// Truncates to at most `max_code_points` Unicode scalar values. Returns true
// if anything was cut.
bool truncate_code_points(std::string& utf8, std::size_t max_code_points);

std::string_view trim(std::string_view text);

}  // namespace evdet
