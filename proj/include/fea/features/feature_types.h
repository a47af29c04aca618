// features/feature_types.h

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

#ifndef FEA_FEATURES_FEATURE_TYPES_H_
#define FEA_FEATURES_FEATURE_TYPES_H_

#include <string>
#include <vector>

#include "fea/core/mat.h"

namespace fea {

// Mono PCM clip in [-1, 1].
struct WaveformClip {
  std::vector<double> samples;
  int sample_rate_hz = 16000;
  std::string id;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Throws if samples are empty, the rate is non-positive, or any amplitude is
// non-finite.
void validate_clip(const WaveformClip& clip);

enum class FeatureKind { kFbank, kMfcc, kFrontendOutput };

std::string feature_kind_name(FeatureKind k);

// Time-major matrix of per-frame feature vectors. One type serves Fbank,
// MFCC, and front-end outputs; `stride_ms` is the time advanced per row.
struct FeatureMatrix {
  Mat data;  // T x D
  double stride_ms = 0.0;
  FeatureKind kind = FeatureKind::kFbank;

  int frames() const { return data.rows(); }
  int dim() const { return data.cols(); }
};

void validate_features(const FeatureMatrix& feat);

struct FbankConfig {
  int n_mels = 80;
  double win_ms = 25.0;
  double hop_ms = 10.0;
  int fft_size = 512;
  double log_floor = 1e-10;
  double dither = 0.0;
  double preemphasis = 0.97;

  int win_samples(int sample_rate_hz) const {
    return static_cast<int>(win_ms * sample_rate_hz / 1000.0 + 0.5);
  }
  int hop_samples(int sample_rate_hz) const {
    return static_cast<int>(hop_ms * sample_rate_hz / 1000.0 + 0.5);
  }
  void validate(int sample_rate_hz) const;
};

struct SpecAugPolicy {
  int n_time_masks = 0;
  int max_time_mask_frames = 0;
  int n_freq_masks = 0;
  int max_freq_mask_bins = 0;
  double replace_value = 0.0;

  void validate() const;
  bool is_identity() const {
    return n_time_masks == 0 && n_freq_masks == 0;
  }
};

}  // namespace fea

#endif  // FEA_FEATURES_FEATURE_TYPES_H_
