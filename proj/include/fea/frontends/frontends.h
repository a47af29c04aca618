// frontends/frontends.h

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

#ifndef FEA_FRONTENDS_FRONTENDS_H_
#define FEA_FRONTENDS_FRONTENDS_H_

#include <memory>
#include <string>
#include <vector>

#include "fea/core/graph.h"
#include "fea/features/feature_types.h"

namespace fea {

// Frame-level output of either front-end, still attached to the graph.
struct FrontEndOutput {
  ad::NodeRef node;  // [T x D]
  double stride_ms = 0.0;

  int frames() const { return node->val.rows(); }
  int dim() const { return node->val.cols(); }
};

FeatureMatrix to_feature_matrix(const FrontEndOutput& out);

struct ConvLayerSpec {
  int channels;
  int kernel;
  int stride;
};

// Strided CNN stack over raw waveform. The default geometry keeps the
// canonical 320-sample (20 ms at 16 kHz) total stride; channel width is a
// knob so desk-scale models stay cheap.
struct WaveFrontEndConfig {
  std::vector<ConvLayerSpec> conv_layers;
  int output_dim = 192;

  static WaveFrontEndConfig defaults(int output_dim, int channels = 64);

  int total_stride_samples() const;
  double stride_ms(int sample_rate_hz) const;
  // frames produced for n samples (0 if too short)
  int output_frames(int n_samples) const;
  // smallest sample count that yields one output frame
  int min_samples() const;
  void validate(int sample_rate_hz) const;
};

// Conv subsampling block over Fbank features. Two strided 2-D conv layers;
// time geometry is non-overlapping so T_out = floor(T / subsample_factor),
// then a linear projection and layer norm to the encoder width.
struct FbankFrontEndConfig {
  int subsample_factor = 2;  // 2 -> 20 ms, 4 -> 40 ms on a 10 ms hop
  int n_mels = 80;
  int hidden_channels = 32;
  int output_dim = 192;

  void validate() const;
  int output_frames(int t_in) const { return t_in / subsample_factor; }
  double output_stride_ms(double in_stride_ms) const {
    return in_stride_ms * subsample_factor;
  }
};

class WaveFrontEnd {
 public:
  WaveFrontEnd(const WaveFrontEndConfig& cfg, int sample_rate_hz,
               uint64_t init_seed);

  // Builds the graph from raw samples. Throws with the minimum sample
  // count when the clip is too short. Increments eval_count().
  FrontEndOutput forward(const WaveformClip& clip) const;

  const WaveFrontEndConfig& config() const { return cfg_; }
  std::vector<Param*> params();
  long long eval_count() const { return eval_count_; }

 private:
  WaveFrontEndConfig cfg_;
  int sample_rate_hz_;
  std::vector<std::unique_ptr<Param>> params_;
  Param* proj_w_;
  Param* proj_b_;
  Param* norm_gamma_;
  Param* norm_beta_;
  std::vector<Param*> conv_w_;
  std::vector<Param*> conv_b_;
  mutable long long eval_count_ = 0;
};

class FbankFrontEnd {
 public:
  FbankFrontEnd(const FbankFrontEndConfig& cfg, uint64_t init_seed);

  // feat must be kind=fbank with D=n_mels and T >= subsample_factor.
  FrontEndOutput forward(const FeatureMatrix& feat) const;

  const FbankFrontEndConfig& config() const { return cfg_; }
  std::vector<Param*> params();

 private:
  struct Conv2dSpec {
    int kt, st;
  };
  FbankFrontEndConfig cfg_;
  std::vector<Conv2dSpec> time_geometry_;
  int flat_dim_;  // channels * F_out after the conv stack
  std::vector<std::unique_ptr<Param>> params_;
  std::vector<Param*> conv_w_;
  std::vector<Param*> conv_b_;
  Param* proj_w_;
  Param* proj_b_;
  Param* norm_gamma_;
  Param* norm_beta_;
};

// Keeps every factor-th frame starting at index 0; stride multiplies.
FrontEndOutput downsample_frames(const FrontEndOutput& x, int factor);
FeatureMatrix downsample_frames(const FeatureMatrix& x, int factor);

// Truncates both outputs to min(T_a, T_b) from the start. Strides must
// match and the length gap must be within tolerance.
std::pair<FrontEndOutput, FrontEndOutput> align_lengths(
    const FrontEndOutput& a, const FrontEndOutput& b, int tolerance = 3);

}  // namespace fea

#endif  // FEA_FRONTENDS_FRONTENDS_H_
