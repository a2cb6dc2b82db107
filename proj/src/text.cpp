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

#include "evdet/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evdet {
namespace {

constexpr std::string_view kBuiltinStoplist =
#include "evdet/builtin_stoplist.inc"
    ;

bool is_word_char(UChar32 c) {
  return u_isalnum(c) || (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

}  // namespace

Stoplist Stoplist::from_text(std::string_view text) {
  Stoplist list;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    if (!line.empty() && line.front() != '#') list.words_.insert(normalize_text(line));
    pos = end + 1;
  }
  return list;
}

Stoplist Stoplist::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open stoplist '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

const Stoplist& Stoplist::builtin() {
  static const Stoplist list = from_text(kBuiltinStoplist);
  return list;
}

bool Stoplist::contains(std::string_view token) const {
  return words_.find(std::string(token)) != words_.end();
}

std::string normalize_text(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  icu::UnicodeString unicode = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  unicode.toLower(icu::Locale::getRoot());
  // Case mapping can denormalize, so normalize last.
  icu::UnicodeString normalized = nfc->normalize(unicode, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::vector<std::string> tokenize(std::string_view normalized, const Stoplist& stoplist) {
  std::vector<std::string> tokens;
  const auto* bytes = reinterpret_cast<const uint8_t*>(normalized.data());
  const auto length = static_cast<int32_t>(normalized.size());

  int32_t i = 0;
  int32_t token_start = -1;
  int32_t token_chars = 0;
  auto flush = [&](int32_t end) {
    if (token_start >= 0 && token_chars >= 2) {
      std::string token(normalized.substr(token_start, end - token_start));
      if (!stoplist.contains(token)) tokens.push_back(std::move(token));
    }
    token_start = -1;
    token_chars = 0;
  };

  while (i < length) {
    const int32_t at = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c >= 0 && is_word_char(c)) {
      if (token_start < 0) token_start = at;
      ++token_chars;
      continue;
    }
    flush(at);
    if (c == '#' || c == '@') {
      // A prefix only counts when a word character follows immediately.
      int32_t peek = i;
      UChar32 next = -1;
      if (peek < length) U8_NEXT(bytes, peek, length, next);
      if (next >= 0 && is_word_char(next)) {
        token_start = at;
        token_chars = 0;
      }
    }
  }
  flush(length);
  return tokens;
}

std::size_t count_code_points(std::string_view utf8) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  std::size_t count = 0;
  for (int32_t i = 0; i < length;) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    ++count;
  }
  return count;
}

bool truncate_code_points(std::string& utf8, std::size_t max_code_points) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  std::size_t count = 0;
  int32_t i = 0;
  while (i < length && count < max_code_points) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    ++count;
  }
  if (i >= length) return false;
  utf8.resize(static_cast<std::size_t>(i));
  return true;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = text.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(kSpace);
  return text.substr(first, last - first + 1);
}

}  // namespace evdet
