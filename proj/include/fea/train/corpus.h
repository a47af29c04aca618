// train/corpus.h

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

#ifndef FEA_TRAIN_CORPUS_H_
#define FEA_TRAIN_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fea/data/manifest.h"
#include "fea/features/feature_types.h"
#include "fea/losses/vocab.h"

namespace fea {

// One cached utterance: lossless PCM plus the clean Fbank matrix and the
// encoded transcript. SpecAug copies are made per step from the clean cache.
struct CachedUtterance {
  std::string id;
  std::vector<int16_t> pcm;
  FeatureMatrix fbank_clean;
  Transcript transcript;

  WaveformClip clip(int sample_rate_hz) const;
};

// Loads a whole manifest into memory; desk-scale corpora fit comfortably.
class CorpusStore {
 public:
  CorpusStore(const Manifest& manifest, const FbankConfig& fbank_cfg,
              int sample_rate_hz);

  size_t size() const { return utts_.size(); }
  const CachedUtterance& utt(size_t i) const { return utts_[i]; }
  int sample_rate_hz() const { return sample_rate_hz_; }

 private:
  std::vector<CachedUtterance> utts_;
  int sample_rate_hz_;
};

// Deterministic epoch-shuffled batching: update k (1-based) always maps to
// the same utterance indices for a given seed, so resumed runs see the
// exact stream an uninterrupted run would.
std::vector<size_t> batch_indices(size_t corpus_size, int batch_size,
                                  long long update, uint64_t seed);

long long updates_per_epoch(size_t corpus_size, int batch_size);

}  // namespace fea

#endif  // FEA_TRAIN_CORPUS_H_
