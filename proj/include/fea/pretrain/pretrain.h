// pretrain/pretrain.h

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

#ifndef FEA_PRETRAIN_PRETRAIN_H_
#define FEA_PRETRAIN_PRETRAIN_H_

#include <string>
#include <vector>

#include "fea/data/run_config.h"
#include "fea/pretrain/kmeans.h"
#include "fea/train/corpus.h"
#include "fea/train/optimizer.h"

namespace fea {

using LabelTable = std::vector<std::pair<std::string, std::vector<int>>>;

// K-means pseudo labels on 39-dim MFCC (13 cepstra + deltas) at the Fbank
// hop. Labels stay at the 10 ms hop here; the pre-training loop resamples
// them to the waveform front-end stride per utterance.
struct PretrainLabels {
  KMeansModel kmeans;
  LabelTable labels;
};

PretrainLabels prepare_labels(const RunConfig& cfg, const CorpusStore& train);

struct PretrainStepResult {
  double loss = 0.0;
  long long masked_frames = 0;
  bool updated = false;  // false when no frame was masked
};

// One masked-prediction update through waveform front-end + encoder +
// pretrain head. Labels are per-utterance cluster ids at the label stride
// (Fbank hop); they are resampled and truncated inside.
PretrainStepResult pretrain_step(
    EncoderModel& model, const std::vector<const CachedUtterance*>& batch,
    const std::vector<const std::vector<int>*>& labels, double label_stride_ms,
    double mask_prob, int mask_span, AdamW& opt, double lr,
    uint64_t step_seed);

// Masked-prediction accuracy over a fixed set of utterances with a fixed
// masking seed; chance level is 1/K.
double masked_prediction_accuracy(EncoderModel& model,
                                  const std::vector<const CachedUtterance*>&
                                      utts,
                                  const std::vector<const std::vector<int>*>&
                                      labels,
                                  double label_stride_ms, double mask_prob,
                                  int mask_span, uint64_t seed);

struct PretrainSummary {
  double first_loss = 0.0;
  double final_loss = 0.0;
  double heldout_masked_accuracy = 0.0;
  long long updates = 0;
};

// Full toy pipeline: masked-prediction training on pseudo labels, then a
// checkpoint with the K-means model embedded.
PretrainSummary run_pretrain(const RunConfig& cfg, const CorpusStore& train,
                             const CorpusStore& dev,
                             const PretrainLabels& labels,
                             const std::string& checkpoint_out,
                             const std::string& cmdline);

}  // namespace fea

#endif  // FEA_PRETRAIN_PRETRAIN_H_
