// train/corpus.cc

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

#include "fea/train/corpus.h"

#include <numeric>

#include "fea/core/error.h"
#include "fea/core/rng.h"
#include "fea/data/wav_io.h"
#include "fea/features/fbank.h"

namespace fea {

WaveformClip CachedUtterance::clip(int sample_rate_hz) const {
  return clip_from_pcm16(pcm, sample_rate_hz, id);
}

CorpusStore::CorpusStore(const Manifest& manifest, const FbankConfig& fbank_cfg,
                         int sample_rate_hz)
    : sample_rate_hz_(sample_rate_hz) {
  FEA_CHECK_T(!manifest.empty(), DataError, "manifest has no utterances");
  utts_.reserve(manifest.size());
  for (const auto& rec : manifest.records) {
    CachedUtterance u;
    u.id = rec.utt_id;
    u.pcm = read_audio_pcm16(rec.audio_path, sample_rate_hz);
    u.fbank_clean = compute_fbank(u.clip(sample_rate_hz), fbank_cfg);
    u.transcript = Transcript::from_text(rec.text);
    utts_.push_back(std::move(u));
  }
}

long long updates_per_epoch(size_t corpus_size, int batch_size) {
  return static_cast<long long>((corpus_size + batch_size - 1) / batch_size);
}

std::vector<size_t> batch_indices(size_t corpus_size, int batch_size,
                                  long long update, uint64_t seed) {
  FEA_CHECK(corpus_size > 0 && batch_size >= 1 && update >= 1,
            "batch_indices: bad arguments");
  const long long per_epoch = updates_per_epoch(corpus_size, batch_size);
  const long long epoch = (update - 1) / per_epoch;
  const long long pos = (update - 1) % per_epoch;

  // Fisher-Yates with an epoch-derived stream
  std::vector<size_t> perm(corpus_size);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(hash_seed(seed, 0xBA7C4ull, static_cast<uint64_t>(epoch)));
  for (size_t i = corpus_size - 1; i > 0; --i) {
    const size_t j = static_cast<size_t>(rng.next_below(
        static_cast<int64_t>(i + 1)));
    std::swap(perm[i], perm[j]);
  }

  const size_t begin = static_cast<size_t>(pos) * batch_size;
  const size_t end = std::min(corpus_size, begin + batch_size);
  return std::vector<size_t>(perm.begin() + begin, perm.begin() + end);
}

}  // namespace fea
