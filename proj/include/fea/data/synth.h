// data/synth.h

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

#ifndef FEA_DATA_SYNTH_H_
#define FEA_DATA_SYNTH_H_

#include <string>
#include <vector>

#include "fea/features/feature_types.h"

namespace fea {

// Synthetic spoken-token corpus: each letter is a short two-tone chirp with
// a letter-specific frequency pair, words are letter sequences, and word
// gaps are silences. CPU-sized stand-in for real speech with a fully known
// transcript, used by the desk-scale training runs.
struct SynthSpec {
  int n_train = 600;
  int n_dev = 64;
  int n_test = 64;
  int n_letters = 10;  // tokens 'a' .. 'a'+n_letters-1
  int min_words = 2, max_words = 3;
  int min_word_len = 3, max_word_len = 5;
  double letter_s = 0.10;      // nominal token duration
  double letter_jitter = 0.1;  // +-10% duration jitter
  double gap_s = 0.12;         // inter-word silence
  double edge_s = 0.06;        // leading/trailing silence
  double noise_level = 0.01;
  int sample_rate_hz = 16000;
  uint64_t seed = 7;
};

// One deterministic utterance; the transcript comes back via *text.
std::vector<double> synth_utterance(const SynthSpec& spec, uint64_t utt_seed,
                                    std::string* text);

// Writes wav/<id>.wav plus train.jsonl / dev.jsonl / test.jsonl manifests
// under out_dir.
void synth_corpus(const SynthSpec& spec, const std::string& out_dir);

}  // namespace fea

#endif  // FEA_DATA_SYNTH_H_
