// losses/vocab.h

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

#ifndef FEA_LOSSES_VOCAB_H_
#define FEA_LOSSES_VOCAB_H_

#include <string>
#include <vector>

namespace fea {

// Letter model units: blank at index 0, then space, apostrophe, a..z.
// V = 29. Fixed inventory; transcripts are normalized into it.
class LetterVocab {
 public:
  static constexpr int kBlankId = 0;

  LetterVocab();

  int size() const { return static_cast<int>(chars_.size()) + 1; }
  bool contains(char c) const;
  int id_of(char c) const;   // throws on out-of-vocabulary
  char char_of(int id) const;  // id >= 1; throws on blank or out of range

  std::vector<int> encode(const std::string& text) const;
  std::string decode(const std::vector<int>& ids) const;

  // Lowercases, maps whitespace runs to single spaces, drops characters
  // outside the vocabulary. Returns the normalized text; if stripped_count
  // is non-null, receives the number of dropped characters.
  std::string normalize(const std::string& text,
                        int* stripped_count = nullptr) const;

 private:
  std::string chars_;        // index i holds the char for id i+1
  int ids_by_char_[256];
};

const LetterVocab& letter_vocab();

// Letter sequence plus its blank-free id encoding.
struct Transcript {
  std::string text;
  std::vector<int> token_ids;

  static Transcript from_text(const std::string& text);
  static Transcript from_ids(const std::vector<int>& ids);
};

// Splits at spaces, dropping empty tokens.
std::vector<std::string> split_words(const std::string& text);

}  // namespace fea

#endif  // FEA_LOSSES_VOCAB_H_
