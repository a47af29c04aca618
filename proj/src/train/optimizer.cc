// train/optimizer.cc

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

#include "fea/train/optimizer.h"

#include <cmath>

#include "fea/core/error.h"

namespace fea {

void AdamW::step(const std::vector<Param*>& params, double lr) {
  // global-norm clip over the updated set
  double scale = 1.0;
  if (cfg_.clip_norm > 0.0) {
    double norm_sq = 0.0;
    for (const Param* p : params)
      for (size_t i = 0; i < p->grad.size(); ++i) {
        const double g = p->grad.data()[i];
        norm_sq += g * g;
      }
    const double norm = std::sqrt(norm_sq);
    if (norm > cfg_.clip_norm) scale = cfg_.clip_norm / norm;
  }

  for (Param* p : params) {
    auto it = state_.find(p->name);
    if (it == state_.end()) {
      ParamState st;
      st.m.resize(p->value.rows(), p->value.cols());
      st.v.resize(p->value.rows(), p->value.cols());
      it = state_.emplace(p->name, std::move(st)).first;
    }
    ParamState& st = it->second;
    FEA_CHECK(st.m.same_shape(p->value),
              "optimizer state shape mismatch for '" << p->name << "'");
    st.t += 1;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(st.t));
    for (size_t i = 0; i < p->value.size(); ++i) {
      const double g = p->grad.data()[i] * scale;
      double& m = st.m.data()[i];
      double& v = st.v.data()[i];
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m / bc1;
      const double vhat = v / bc2;
      double& w = p->value.data()[i];
      w -= lr * cfg_.weight_decay * w;
      w -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

void AdamW::reset_state(const std::vector<Param*>& params) {
  for (const Param* p : params) state_.erase(p->name);
}

}  // namespace fea
