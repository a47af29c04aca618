// features/specaug.h

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

#ifndef FEA_FEATURES_SPECAUG_H_
#define FEA_FEATURES_SPECAUG_H_

#include <cstdint>

#include "fea/features/feature_types.h"

namespace fea {

// Masks random contiguous time spans and frequency bands of an Fbank matrix
// with policy.replace_value. Shape-preserving, deterministic per rng_seed.
// Only defined for kind = fbank.
FeatureMatrix apply_specaug(const FeatureMatrix& feat,
                            const SpecAugPolicy& policy, uint64_t rng_seed);

}  // namespace fea

#endif  // FEA_FEATURES_SPECAUG_H_
