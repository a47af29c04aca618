// losses/losses.cc

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

#include "fea/losses/losses.h"

#include <cmath>
#include <cstdio>

#include "fea/core/error.h"
#include "fea/losses/vocab.h"

namespace fea {

ad::NodeRef l2_frontend_loss(const ad::NodeRef& wave_out,
                             const ad::NodeRef& fbank_out) {
  FEA_CHECK(wave_out->val.same_shape(fbank_out->val),
            "l2_frontend_loss: shape mismatch ("
                << wave_out->val.rows() << "x" << wave_out->val.cols()
                << " vs " << fbank_out->val.rows() << "x"
                << fbank_out->val.cols() << "); align lengths first");
  // the waveform side is the frozen teacher: gradient stops here
  return ad::mse_all(fbank_out, ad::stop_grad(wave_out));
}

double frontend_euclid_distance(const Mat& a, const Mat& b) {
  FEA_CHECK(a.same_shape(b), "frontend_euclid_distance: shape mismatch");
  double total = 0.0;
  for (int r = 0; r < a.rows(); ++r) {
    const double* ar = a.row(r);
    const double* br = b.row(r);
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
      const double d = ar[j] - br[j];
      s += d * d;
    }
    total += std::sqrt(s);
  }
  return total / a.rows();
}

ad::NodeRef masked_cross_entropy(const ad::NodeRef& logits,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& masked_rows) {
  FEA_CHECK(static_cast<int>(labels.size()) == logits->val.rows(),
            "masked_cross_entropy: labels length " << labels.size()
                                                   << " != T "
                                                   << logits->val.rows());
  if (masked_rows.empty()) {
    // defined as 0 with zero gradient
    return ad::constant(Mat(1, 1, 0.0));
  }
  auto logp = ad::log_softmax_rows(logits);
  return ad::gather_nll_mean(logp, labels, masked_rows);
}

namespace {

WerCounts word_edit_counts(const std::vector<std::string>& hyp,
                           const std::vector<std::string>& ref) {
  const int n = static_cast<int>(ref.size());
  const int m = static_cast<int>(hyp.size());
  // cost[i][j]: edit distance between ref[0:i] and hyp[0:j]
  std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1, 0));
  for (int i = 0; i <= n; ++i) cost[i][0] = i;
  for (int j = 0; j <= m; ++j) cost[0][j] = j;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const int sub = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int del = cost[i - 1][j] + 1;
      const int ins = cost[i][j - 1] + 1;
      cost[i][j] = std::min(sub, std::min(del, ins));
    }
  }
  // backtrace, preferring matches/substitutions
  WerCounts c;
  c.ref_words = n;
  int i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        cost[i][j] == cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++c.substitutions;
      --i;
      --j;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

}  // namespace

WerCounts wer_counts(const std::string& hyp, const std::string& ref) {
  const auto ref_words = split_words(ref);
  FEA_CHECK_T(!ref_words.empty(), DataError,
              "wer: reference has no words");
  return word_edit_counts(split_words(hyp), ref_words);
}

double wer(const std::string& hyp, const std::string& ref) {
  return wer_counts(hyp, ref).wer();
}

std::string wer_summary_line(const WerCounts& c) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "WER %.2f S=%lld D=%lld I=%lld N=%lld",
                100.0 * c.wer(), c.substitutions, c.deletions, c.insertions,
                c.ref_words);
  return buf;
}

}  // namespace fea
