// train/optimizer.h

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

#ifndef FEA_TRAIN_OPTIMIZER_H_
#define FEA_TRAIN_OPTIMIZER_H_

#include <map>
#include <string>
#include <vector>

#include "fea/core/graph.h"

namespace fea {

// Adam with decoupled weight decay. Moment state is keyed by parameter name
// so it survives checkpoint round trips, and per-group slices can be
// re-initialized at the adapter stage boundary.
class AdamW {
 public:
  struct Config {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
    double clip_norm = 1.0;  // 0 disables clipping
  };

  struct ParamState {
    Mat m;
    Mat v;
    long long t = 0;
  };

  explicit AdamW(const Config& cfg) : cfg_(cfg) {}

  // One update over exactly these params, reading Param::grad. Gradients
  // are clipped jointly by global norm before the moment update.
  void step(const std::vector<Param*>& params, double lr);

  // Drops moment state for the given params (fresh optimizer for them).
  void reset_state(const std::vector<Param*>& params);

  const Config& config() const { return cfg_; }
  std::map<std::string, ParamState>& state() { return state_; }
  const std::map<std::string, ParamState>& state() const { return state_; }

 private:
  Config cfg_;
  std::map<std::string, ParamState> state_;
};

}  // namespace fea

#endif  // FEA_TRAIN_OPTIMIZER_H_
