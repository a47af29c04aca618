// losses/vocab.cc

// Copyright 2026  Front-End Adapter Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "fea/losses/vocab.h"

#include <cctype>

#include "fea/core/error.h"

namespace fea {

LetterVocab::LetterVocab() {
  chars_ = " '";
  for (char c = 'a'; c <= 'z'; ++c) chars_ += c;
  for (int i = 0; i < 256; ++i) ids_by_char_[i] = -1;
  for (size_t i = 0; i < chars_.size(); ++i)
    ids_by_char_[static_cast<unsigned char>(chars_[i])] =
        static_cast<int>(i) + 1;
}

bool LetterVocab::contains(char c) const {
  return ids_by_char_[static_cast<unsigned char>(c)] > 0;
}

int LetterVocab::id_of(char c) const {
  const int id = ids_by_char_[static_cast<unsigned char>(c)];
  FEA_CHECK_T(id > 0, DataError,
              "character '" << c << "' not in the letter vocabulary");
  return id;
}

char LetterVocab::char_of(int id) const {
  FEA_CHECK(id >= 1 && id <= static_cast<int>(chars_.size()),
            "vocab id " << id << " out of range");
  return chars_[id - 1];
}

std::vector<int> LetterVocab::encode(const std::string& text) const {
  std::vector<int> ids;
  ids.reserve(text.size());
  for (char c : text) ids.push_back(id_of(c));
  return ids;
}

std::string LetterVocab::decode(const std::vector<int>& ids) const {
  std::string s;
  s.reserve(ids.size());
  for (int id : ids) s += char_of(id);
  return s;
}

std::string LetterVocab::normalize(const std::string& text,
                                   int* stripped_count) const {
  std::string out;
  out.reserve(text.size());
  int stripped = 0;
  bool pending_space = false;
  for (char raw : text) {
    char c = static_cast<char>(
        std::tolower(static_cast<unsigned char>(raw)));
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (!contains(c) || c == ' ') {
      ++stripped;
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += c;
  }
  if (stripped_count) *stripped_count = stripped;
  return out;
}

const LetterVocab& letter_vocab() {
  static const LetterVocab vocab;
  return vocab;
}

Transcript Transcript::from_text(const std::string& text) {
  Transcript t;
  t.text = text;
  t.token_ids = letter_vocab().encode(text);
  return t;
}

Transcript Transcript::from_ids(const std::vector<int>& ids) {
  Transcript t;
  t.token_ids = ids;
  t.text = letter_vocab().decode(ids);
  return t;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (c == ' ') {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

}  // namespace fea
