// train/schedule.h

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

#ifndef FEA_TRAIN_SCHEDULE_H_
#define FEA_TRAIN_SCHEDULE_H_

#include <string>

#include "fea/losses/losses.h"

namespace fea {

// Warm-up boundary in optimizer updates plus the running update counter.
// Updates are 1-based; the warm-up regime is active exactly while n <= n_w,
// so the regime flips once, at n = n_w + 1.
class AdapterSchedule {
 public:
  static AdapterSchedule from_updates(long long n_w);
  // "3 epochs" style boundary, converted to updates at construction time.
  static AdapterSchedule from_epochs(long long epochs,
                                     long long updates_per_epoch);

  long long warmup_updates() const { return n_w_; }
  long long current_update() const { return n_; }

  void set_update(long long n) { n_ = n; }
  void advance() { ++n_; }

  Regime regime() const { return regime_at(n_); }
  Regime regime_at(long long n) const {
    return n <= n_w_ ? Regime::kWarmup : Regime::kFinetune;
  }

 private:
  AdapterSchedule(long long n_w) : n_w_(n_w) {}
  long long n_w_ = 0;
  long long n_ = 0;
};

// Linear warm-up, hold, then exponential decay to final_scale * peak.
struct TriStageLr {
  double peak = 3e-4;
  double warmup_frac = 0.1;
  double hold_frac = 0.4;
  double init_scale = 0.01;
  double final_scale = 0.05;

  // update is 1-based; total is the full training length in updates.
  double at(long long update, long long total) const;
};

// Flat rate after a linear warm-up; the pre-training default.
struct WarmupConstantLr {
  double peak = 1e-3;
  double warmup_frac = 0.1;

  double at(long long update, long long total) const;
};

}  // namespace fea

#endif  // FEA_TRAIN_SCHEDULE_H_
