// losses/ctc.cc

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

#include "fea/losses/ctc.h"

#include <cmath>
#include <limits>

#include "fea/core/error.h"

namespace fea {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct CtcWork {
  double loss;
  Mat grad;  // d(-logP)/d logp
};

// Shared forward-backward pass: loss always, gradients when want_grad.
CtcWork ctc_forward_backward(const Mat& logp, const std::vector<int>& target,
                             bool want_grad) {
  const int t_frames = logp.rows();
  const int n_vocab = logp.cols();
  const int blank = LetterVocab::kBlankId;
  for (int id : target) {
    FEA_CHECK_T(id > 0 && id < n_vocab, DataError,
                "ctc_loss: target id " << id << " out of range (V=" << n_vocab
                                       << ", blank excluded)");
  }
  const int need = ctc_min_frames(target);
  FEA_CHECK_T(t_frames >= need, CtcInfeasibleError,
              "ctc_loss: target of length " << target.size() << " needs >= "
                                            << need << " frames, got "
                                            << t_frames);

  // sanity on the log-normalization precondition (first row only; cheap)
  {
    double lse = kNegInf;
    for (int v = 0; v < n_vocab; ++v) lse = log_add(lse, logp(0, v));
    FEA_CHECK(std::fabs(lse) < 1e-5,
              "ctc_loss: rows are not log-normalized (logsumexp=" << lse
                                                                  << ")");
  }

  // extended sequence with interleaved blanks
  const int s_len = 2 * static_cast<int>(target.size()) + 1;
  std::vector<int> lab(s_len, blank);
  for (size_t i = 0; i < target.size(); ++i) lab[2 * i + 1] = target[i];
  auto can_skip = [&](int s) {
    return s >= 2 && lab[s] != blank && lab[s] != lab[s - 2];
  };

  Mat alpha(t_frames, s_len, kNegInf);
  alpha(0, 0) = logp(0, lab[0]);
  if (s_len > 1) alpha(0, 1) = logp(0, lab[1]);
  for (int t = 1; t < t_frames; ++t) {
    for (int s = 0; s < s_len; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = log_add(a, alpha(t - 1, s - 1));
      if (can_skip(s)) a = log_add(a, alpha(t - 1, s - 2));
      if (a != kNegInf) alpha(t, s) = a + logp(t, lab[s]);
    }
  }
  double log_prob = alpha(t_frames - 1, s_len - 1);
  if (s_len > 1) log_prob = log_add(log_prob, alpha(t_frames - 1, s_len - 2));
  FEA_CHECK(log_prob != kNegInf, "ctc_loss: zero-probability target");

  CtcWork out;
  out.loss = -log_prob;
  if (!want_grad) return out;

  Mat beta(t_frames, s_len, kNegInf);
  beta(t_frames - 1, s_len - 1) = 0.0;
  if (s_len > 1) beta(t_frames - 1, s_len - 2) = 0.0;
  for (int t = t_frames - 2; t >= 0; --t) {
    for (int s = 0; s < s_len; ++s) {
      double b = kNegInf;
      b = log_add(b, beta(t + 1, s) + logp(t + 1, lab[s]));
      if (s + 1 < s_len)
        b = log_add(b, beta(t + 1, s + 1) + logp(t + 1, lab[s + 1]));
      if (s + 2 < s_len && can_skip(s + 2))
        b = log_add(b, beta(t + 1, s + 2) + logp(t + 1, lab[s + 2]));
      beta(t, s) = b;
    }
  }

  // d(-logP)/d logp[t,k] = -sum_{s: lab[s]=k} exp(alpha + beta - logP)
  out.grad.resize(t_frames, n_vocab);
  for (int t = 0; t < t_frames; ++t) {
    for (int s = 0; s < s_len; ++s) {
      const double g = alpha(t, s) + beta(t, s);
      if (g == kNegInf) continue;
      out.grad(t, lab[s]) -= std::exp(g - log_prob);
    }
  }
  return out;
}

}  // namespace

int ctc_min_frames(const std::vector<int>& ids) {
  int need = static_cast<int>(ids.size());
  for (size_t i = 1; i < ids.size(); ++i)
    if (ids[i] == ids[i - 1]) ++need;
  return need;
}

ad::NodeRef ctc_loss(const ad::NodeRef& logp, const std::vector<int>& target) {
  CtcWork work = ctc_forward_backward(logp->val, target, true);
  Mat out(1, 1);
  out(0, 0) = work.loss;
  ad::Node* lp = logp.get();
  auto grad = std::make_shared<Mat>(std::move(work.grad));
  return ad::make_node(std::move(out), {logp}, [lp, grad](ad::Node& self) {
    lp->grad.axpy(self.grad(0, 0), *grad);
  });
}

double ctc_loss_value(const Mat& logp, const std::vector<int>& target) {
  return ctc_forward_backward(logp, target, false).loss;
}

Transcript ctc_greedy_decode(const Mat& logp) {
  std::vector<int> ids;
  int prev = -1;
  for (int t = 0; t < logp.rows(); ++t) {
    const double* row = logp.row(t);
    int best = 0;
    for (int v = 1; v < logp.cols(); ++v)
      if (row[v] > row[best]) best = v;
    if (best != prev && best != LetterVocab::kBlankId) ids.push_back(best);
    prev = best;
  }
  return Transcript::from_ids(ids);
}

}  // namespace fea
