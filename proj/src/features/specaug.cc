// features/specaug.cc

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

#include "fea/features/specaug.h"

#include <algorithm>

#include "fea/core/error.h"
#include "fea/core/rng.h"

namespace fea {

void SpecAugPolicy::validate() const {
  FEA_CHECK_T(n_time_masks >= 0 && max_time_mask_frames >= 0 &&
                  n_freq_masks >= 0 && max_freq_mask_bins >= 0,
              ConfigError, "SpecAug counts and widths must be >= 0");
}

FeatureMatrix apply_specaug(const FeatureMatrix& feat,
                            const SpecAugPolicy& policy, uint64_t rng_seed) {
  FEA_CHECK_T(feat.kind == FeatureKind::kFbank, DataError,
              "apply_specaug expects fbank features, got "
                  << feature_kind_name(feat.kind));
  policy.validate();
  FeatureMatrix out = feat;
  if (policy.is_identity()) return out;

  Rng rng(rng_seed);
  const int t = out.frames(), d = out.dim();

  for (int i = 0; i < policy.n_time_masks; ++i) {
    const int max_w = std::min(policy.max_time_mask_frames, t);
    const int w = static_cast<int>(rng.next_below(max_w + 1));
    const int t0 = static_cast<int>(rng.next_below(t - w + 1));
    for (int r = t0; r < t0 + w; ++r)
      for (int j = 0; j < d; ++j) out.data(r, j) = policy.replace_value;
  }
  for (int i = 0; i < policy.n_freq_masks; ++i) {
    const int max_w = std::min(policy.max_freq_mask_bins, d);
    const int w = static_cast<int>(rng.next_below(max_w + 1));
    const int f0 = static_cast<int>(rng.next_below(d - w + 1));
    for (int r = 0; r < t; ++r)
      for (int j = f0; j < f0 + w; ++j) out.data(r, j) = policy.replace_value;
  }
  return out;
}

}  // namespace fea
