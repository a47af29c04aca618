// train/schedule.cc

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

#include "fea/train/schedule.h"

#include <algorithm>
#include <cmath>

#include "fea/core/error.h"

namespace fea {

AdapterSchedule AdapterSchedule::from_updates(long long n_w) {
  FEA_CHECK_T(n_w >= 0, ConfigError, "warm-up boundary must be >= 0");
  return AdapterSchedule(n_w);
}

AdapterSchedule AdapterSchedule::from_epochs(long long epochs,
                                             long long updates_per_epoch) {
  FEA_CHECK_T(epochs >= 0 && updates_per_epoch >= 1, ConfigError,
              "bad epoch-based warm-up spec");
  return AdapterSchedule(epochs * updates_per_epoch);
}

double TriStageLr::at(long long update, long long total) const {
  FEA_CHECK(update >= 1 && total >= 1, "TriStageLr: bad update index");
  const long long warm = std::max<long long>(
      1, static_cast<long long>(warmup_frac * static_cast<double>(total)));
  const long long hold = static_cast<long long>(
      hold_frac * static_cast<double>(total));
  if (update <= warm) {
    const double f = static_cast<double>(update) / static_cast<double>(warm);
    return peak * (init_scale + (1.0 - init_scale) * f);
  }
  if (update <= warm + hold) return peak;
  const long long decay_len = std::max<long long>(1, total - warm - hold);
  const double f = std::min(
      1.0, static_cast<double>(update - warm - hold) /
               static_cast<double>(decay_len));
  return peak * std::pow(final_scale, f);
}

double WarmupConstantLr::at(long long update, long long total) const {
  FEA_CHECK(update >= 1 && total >= 1, "WarmupConstantLr: bad update index");
  const long long warm = std::max<long long>(
      1, static_cast<long long>(warmup_frac * static_cast<double>(total)));
  if (update <= warm)
    return peak * static_cast<double>(update) / static_cast<double>(warm);
  return peak;
}

}  // namespace fea
