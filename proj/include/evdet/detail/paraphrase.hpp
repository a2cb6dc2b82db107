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

#include <cctype>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace evdet {

template <typename Rng>
std::string paraphrase(std::string_view phrase, double rate, Rng& rng) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < phrase.size()) {
    const std::size_t start = phrase.find_first_not_of(' ', pos);
    if (start == std::string_view::npos) break;
    std::size_t end = phrase.find(' ', start);
    if (end == std::string_view::npos) end = phrase.size();
    tokens.emplace_back(phrase.substr(start, end - start));
    pos = end;
  }
  if (tokens.empty()) return std::string(phrase);

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> op(0, 2);
  std::uniform_int_distribution<int> letter('a', 'z');
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (rate <= 0.0 || coin(rng) >= rate) {
      out.push_back(std::move(tokens[i]));
      continue;
    }
    switch (op(rng)) {
      case 0:  // swap with the next token
        if (i + 1 < tokens.size()) {
          std::swap(tokens[i], tokens[i + 1]);
        }
        out.push_back(std::move(tokens[i]));
        break;
      case 1:  // drop, unless it would empty the text
        if (out.empty() && i + 1 == tokens.size()) out.push_back(std::move(tokens[i]));
        break;
      default: {  // typo on an ASCII letter
        std::string& token = tokens[i];
        std::vector<std::size_t> letters;
        for (std::size_t c = 0; c < token.size(); ++c) {
          const unsigned char ch = static_cast<unsigned char>(token[c]);
          if (ch < 0x80 && std::isalpha(ch)) letters.push_back(c);
        }
        if (!letters.empty()) {
          std::uniform_int_distribution<std::size_t> at(0, letters.size() - 1);
          const std::size_t c = letters[at(rng)];
          if (letters.size() > 2 && coin(rng) < 0.5) {
            token.erase(c, 1);
          } else {
            token[c] = static_cast<char>(letter(rng));
          }
        }
        out.push_back(std::move(token));
        break;
      }
    }
  }
  std::string text;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) text.push_back(' ');
    text += out[i];
  }
  return text;
}

}  // namespace evdet
