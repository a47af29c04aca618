// losses/ctc.h

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

#ifndef FEA_LOSSES_CTC_H_
#define FEA_LOSSES_CTC_H_

#include <vector>

#include "fea/core/graph.h"
#include "fea/losses/vocab.h"

namespace fea {

// Minimum frames needed to emit `ids`: |ids| plus one blank per adjacent
// repeated pair.
int ctc_min_frames(const std::vector<int>& ids);

// -log P(target | logp) by the forward dynamic program in log space, with
// blank = LetterVocab::kBlankId. Rows of logp must be log-normalized.
// Gradient w.r.t. logp is the negative state posterior, computed by the
// alpha-beta recursion. Throws CtcInfeasibleError when T < ctc_min_frames.
ad::NodeRef ctc_loss(const ad::NodeRef& logp, const std::vector<int>& target);

// Convenience: loss value only, on a plain matrix.
double ctc_loss_value(const Mat& logp, const std::vector<int>& target);

// Per-frame argmax, collapse consecutive repeats, drop blanks.
Transcript ctc_greedy_decode(const Mat& logp);

}  // namespace fea

#endif  // FEA_LOSSES_CTC_H_
