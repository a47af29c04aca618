// losses/losses.h

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

#ifndef FEA_LOSSES_LOSSES_H_
#define FEA_LOSSES_LOSSES_H_

#include <vector>

#include "fea/core/graph.h"

namespace fea {

enum class Regime { kWarmup, kFinetune };

inline const char* regime_name(Regime r) {
  return r == Regime::kWarmup ? "warmup" : "finetune";
}

// Per-step loss record. During warm-up l_total = l_ctc + l_l2 (l_l2 already
// carries the configured weight); during fine-tuning l_l2 = 0 and
// l_total = l_ctc.
struct LossBreakdown {
  double l_ctc = 0.0;
  double l_l2 = 0.0;
  double l_total = 0.0;
  long long step_n = 0;
  Regime regime = Regime::kFinetune;
};

// Front-end distillation loss: mean over frames and dims of the squared
// element difference. The value is symmetric in its arguments, but the
// gradient flows only into fbank_out's producers; wave_out is treated as a
// constant teacher (stop-gradient boundary inside the op).
ad::NodeRef l2_frontend_loss(const ad::NodeRef& wave_out,
                             const ad::NodeRef& fbank_out);

// Plain metric used for the training curve: mean over frames of the
// per-frame Euclidean distance between the two outputs.
double frontend_euclid_distance(const Mat& a, const Mat& b);

// Mean cross-entropy of logits vs labels over the masked rows only.
// Empty mask is defined as exactly 0 with no gradient.
ad::NodeRef masked_cross_entropy(const ad::NodeRef& logits,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& masked_rows);

// Word error rate pieces from a Levenshtein alignment at the word level.
struct WerCounts {
  long long substitutions = 0;
  long long deletions = 0;
  long long insertions = 0;
  long long ref_words = 0;

  double wer() const {
    return static_cast<double>(substitutions + deletions + insertions) /
           static_cast<double>(ref_words);
  }
  WerCounts& operator+=(const WerCounts& o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    ref_words += o.ref_words;
    return *this;
  }
};

// hyp/ref are letter strings; words are formed by splitting at spaces.
// Throws on an empty reference.
WerCounts wer_counts(const std::string& hyp, const std::string& ref);
double wer(const std::string& hyp, const std::string& ref);

// Summary line: "WER <percent> S=<s> D=<d> I=<i> N=<n>"
std::string wer_summary_line(const WerCounts& c);

}  // namespace fea

#endif  // FEA_LOSSES_LOSSES_H_
