// frontends/frontends.cc

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

#include "fea/frontends/frontends.h"

#include <cmath>

#include "fea/core/error.h"
#include "fea/core/rng.h"

namespace fea {

namespace {

Mat uniform_init(int rows, int cols, double bound, Rng& rng) {
  Mat m(rows, cols);
  for (size_t i = 0; i < m.size(); ++i)
    m.data()[i] = bound * (2.0 * rng.next_double() - 1.0);
  return m;
}

Param* add_param(std::vector<std::unique_ptr<Param>>& store,
                 const std::string& name, Mat value) {
  store.push_back(std::make_unique<Param>(name, std::move(value)));
  return store.back().get();
}

}  // namespace

FeatureMatrix to_feature_matrix(const FrontEndOutput& out) {
  FeatureMatrix f;
  f.data = out.node->val;
  f.stride_ms = out.stride_ms;
  f.kind = FeatureKind::kFrontendOutput;
  return f;
}

// ---- WaveFrontEnd ----

WaveFrontEndConfig WaveFrontEndConfig::defaults(int output_dim, int channels) {
  WaveFrontEndConfig cfg;
  const int kernels[7] = {10, 3, 3, 3, 3, 2, 2};
  const int strides[7] = {5, 2, 2, 2, 2, 2, 2};
  for (int i = 0; i < 7; ++i)
    cfg.conv_layers.push_back({channels, kernels[i], strides[i]});
  cfg.output_dim = output_dim;
  return cfg;
}

int WaveFrontEndConfig::total_stride_samples() const {
  int s = 1;
  for (const auto& l : conv_layers) s *= l.stride;
  return s;
}

double WaveFrontEndConfig::stride_ms(int sample_rate_hz) const {
  return 1000.0 * total_stride_samples() / sample_rate_hz;
}

int WaveFrontEndConfig::output_frames(int n_samples) const {
  int t = n_samples;
  for (const auto& l : conv_layers) {
    if (t < l.kernel) return 0;
    t = (t - l.kernel) / l.stride + 1;
  }
  return t;
}

int WaveFrontEndConfig::min_samples() const {
  int m = 1;
  for (auto it = conv_layers.rbegin(); it != conv_layers.rend(); ++it)
    m = it->kernel + it->stride * (m - 1);
  return m;
}

void WaveFrontEndConfig::validate(int sample_rate_hz) const {
  FEA_CHECK_T(!conv_layers.empty(), ConfigError,
              "waveform front-end needs at least one conv layer");
  for (const auto& l : conv_layers)
    FEA_CHECK_T(l.channels >= 1 && l.kernel >= 1 && l.stride >= 1, ConfigError,
                "bad conv layer spec");
  FEA_CHECK_T(output_dim >= 1, ConfigError, "output_dim must be >= 1");
  // the declared stride must land on an integer number of milliseconds
  const int total = total_stride_samples();
  FEA_CHECK_T((1000LL * total) % sample_rate_hz == 0, ConfigError,
              "total stride " << total
                              << " samples is not a whole number of ms at "
                              << sample_rate_hz << " Hz");
}

WaveFrontEnd::WaveFrontEnd(const WaveFrontEndConfig& cfg, int sample_rate_hz,
                           uint64_t init_seed)
    : cfg_(cfg), sample_rate_hz_(sample_rate_hz) {
  cfg_.validate(sample_rate_hz);
  Rng rng(init_seed);
  int in_ch = 1;
  for (size_t i = 0; i < cfg_.conv_layers.size(); ++i) {
    const auto& l = cfg_.conv_layers[i];
    // Kaiming gain: keeps activation variance stable through the deep
    // GELU conv stack (the default 1/fan_in bound collapses it)
    const double bound = std::sqrt(6.0 / (in_ch * l.kernel));
    const std::string base = "wave_frontend.conv" + std::to_string(i);
    conv_w_.push_back(add_param(
        params_, base + ".w",
        uniform_init(l.channels, in_ch * l.kernel, bound, rng)));
    conv_b_.push_back(add_param(params_, base + ".b", Mat(1, l.channels)));
    in_ch = l.channels;
  }
  const double pbound = std::sqrt(1.0 / in_ch);
  proj_w_ = add_param(params_, "wave_frontend.proj.w",
                      uniform_init(in_ch, cfg_.output_dim, pbound, rng));
  proj_b_ = add_param(params_, "wave_frontend.proj.b", Mat(1, cfg_.output_dim));
  norm_gamma_ = add_param(params_, "wave_frontend.norm.gamma",
                          Mat(1, cfg_.output_dim, 1.0));
  norm_beta_ =
      add_param(params_, "wave_frontend.norm.beta", Mat(1, cfg_.output_dim));
}

std::vector<Param*> WaveFrontEnd::params() {
  std::vector<Param*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

FrontEndOutput WaveFrontEnd::forward(const WaveformClip& clip) const {
  validate_clip(clip);
  FEA_CHECK(clip.sample_rate_hz == sample_rate_hz_,
            "waveform front-end built for " << sample_rate_hz_ << " Hz, got "
                                            << clip.sample_rate_hz);
  const int n = static_cast<int>(clip.samples.size());
  FEA_CHECK_T(n >= cfg_.min_samples(), DataError,
              "clip '" << clip.id << "' too short for the waveform front-end: "
                       << n << " samples, minimum is " << cfg_.min_samples());
  ++eval_count_;

  Mat x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = clip.samples[i];
  ad::NodeRef h = ad::constant(std::move(x));
  for (size_t i = 0; i < cfg_.conv_layers.size(); ++i) {
    const auto& l = cfg_.conv_layers[i];
    h = ad::conv1d(h, ad::leaf(conv_w_[i]), ad::leaf(conv_b_[i]), l.kernel,
                   l.stride);
    h = ad::gelu(h);
  }
  h = ad::linear(h, ad::leaf(proj_w_), ad::leaf(proj_b_));
  h = ad::layer_norm(h, ad::leaf(norm_gamma_), ad::leaf(norm_beta_));

  FrontEndOutput out;
  out.node = h;
  out.stride_ms = cfg_.stride_ms(sample_rate_hz_);
  return out;
}

// ---- FbankFrontEnd ----

void FbankFrontEndConfig::validate() const {
  FEA_CHECK_T(subsample_factor == 2 || subsample_factor == 4, ConfigError,
              "subsample_factor must be 2 or 4, got " << subsample_factor);
  FEA_CHECK_T(n_mels >= 5, ConfigError, "n_mels too small for conv stack");
  FEA_CHECK_T(hidden_channels >= 1 && output_dim >= 1, ConfigError,
              "bad fbank front-end dims");
}

FbankFrontEnd::FbankFrontEnd(const FbankFrontEndConfig& cfg,
                             uint64_t init_seed)
    : cfg_(cfg) {
  cfg_.validate();
  // Non-overlapping time kernels: floor(T/2) per stride-2 layer, so the
  // stack realizes exactly T_out = floor(T / subsample_factor).
  if (cfg_.subsample_factor == 2) {
    time_geometry_ = {{2, 2}, {1, 1}};
  } else {
    time_geometry_ = {{2, 2}, {2, 2}};
  }
  Rng rng(init_seed);
  int f = cfg_.n_mels;
  int in_ch = 1;
  for (size_t i = 0; i < time_geometry_.size(); ++i) {
    const int kt = time_geometry_[i].kt;
    const double bound = std::sqrt(6.0 / (in_ch * kt * 3));
    const std::string base = "fbank_frontend.conv" + std::to_string(i);
    conv_w_.push_back(add_param(
        params_, base + ".w",
        uniform_init(cfg_.hidden_channels, in_ch * kt * 3, bound, rng)));
    conv_b_.push_back(
        add_param(params_, base + ".b", Mat(1, cfg_.hidden_channels)));
    f = (f + 2 - 3) / 2 + 1;  // kf=3, sf=2, pad_f=1
    in_ch = cfg_.hidden_channels;
  }
  flat_dim_ = cfg_.hidden_channels * f;
  const double pbound = std::sqrt(1.0 / flat_dim_);
  proj_w_ = add_param(params_, "fbank_frontend.proj.w",
                      uniform_init(flat_dim_, cfg_.output_dim, pbound, rng));
  proj_b_ =
      add_param(params_, "fbank_frontend.proj.b", Mat(1, cfg_.output_dim));
  norm_gamma_ = add_param(params_, "fbank_frontend.norm.gamma",
                          Mat(1, cfg_.output_dim, 1.0));
  norm_beta_ =
      add_param(params_, "fbank_frontend.norm.beta", Mat(1, cfg_.output_dim));
}

std::vector<Param*> FbankFrontEnd::params() {
  std::vector<Param*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

FrontEndOutput FbankFrontEnd::forward(const FeatureMatrix& feat) const {
  FEA_CHECK_T(feat.kind == FeatureKind::kFbank, DataError,
              "fbank front-end expects fbank features, got "
                  << feature_kind_name(feat.kind));
  FEA_CHECK_T(feat.dim() == cfg_.n_mels, DataError,
              "fbank front-end expects D=" << cfg_.n_mels << ", got "
                                           << feat.dim());
  FEA_CHECK_T(feat.frames() >= cfg_.subsample_factor, DataError,
              "fbank front-end needs at least " << cfg_.subsample_factor
                                                << " frames, got "
                                                << feat.frames());
  ad::NodeRef h = ad::constant(feat.data);
  int f = cfg_.n_mels;
  int in_ch = 1;
  for (size_t i = 0; i < time_geometry_.size(); ++i) {
    const auto [kt, st] = time_geometry_[i];
    h = ad::conv2d(h, ad::leaf(conv_w_[i]), ad::leaf(conv_b_[i]), in_ch, f, kt,
                   3, st, 2, 1);
    h = ad::gelu(h);
    f = (f + 2 - 3) / 2 + 1;
    in_ch = cfg_.hidden_channels;
  }
  h = ad::linear(h, ad::leaf(proj_w_), ad::leaf(proj_b_));
  h = ad::layer_norm(h, ad::leaf(norm_gamma_), ad::leaf(norm_beta_));

  FrontEndOutput out;
  out.node = h;
  out.stride_ms = cfg_.output_stride_ms(feat.stride_ms);
  return out;
}

// ---- stride alignment ----

FrontEndOutput downsample_frames(const FrontEndOutput& x, int factor) {
  FEA_CHECK(factor >= 1, "downsample_frames: factor must be >= 1, got "
                             << factor);
  FrontEndOutput out;
  out.node = ad::take_rows_strided(x.node, factor);
  out.stride_ms = x.stride_ms * factor;
  return out;
}

FeatureMatrix downsample_frames(const FeatureMatrix& x, int factor) {
  FEA_CHECK(factor >= 1, "downsample_frames: factor must be >= 1, got "
                             << factor);
  FeatureMatrix out;
  out.kind = x.kind;
  out.stride_ms = x.stride_ms * factor;
  const int t_out = (x.frames() + factor - 1) / factor;
  out.data.resize(t_out, x.dim());
  for (int r = 0; r < t_out; ++r)
    for (int j = 0; j < x.dim(); ++j) out.data(r, j) = x.data(r * factor, j);
  return out;
}

std::pair<FrontEndOutput, FrontEndOutput> align_lengths(
    const FrontEndOutput& a, const FrontEndOutput& b, int tolerance) {
  FEA_CHECK(std::fabs(a.stride_ms - b.stride_ms) < 1e-9,
            "align_lengths: stride mismatch (" << a.stride_ms << " vs "
                                               << b.stride_ms << " ms)");
  const int ta = a.frames(), tb = b.frames();
  FEA_CHECK(std::abs(ta - tb) <= tolerance,
            "align_lengths: length gap |" << ta << " - " << tb
                                          << "| exceeds tolerance "
                                          << tolerance
                                          << "; check the stride pairing");
  const int t = std::min(ta, tb);
  FrontEndOutput oa = a, ob = b;
  if (ta != t) oa.node = ad::slice_rows(a.node, 0, t);
  if (tb != t) ob.node = ad::slice_rows(b.node, 0, t);
  return {oa, ob};
}

}  // namespace fea
