// encoder/encoder.cc

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

#include "fea/encoder/encoder.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "fea/core/error.h"

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

void EncoderConfig::validate() const {
  FEA_CHECK_T(n_layers >= 0, ConfigError, "n_layers must be >= 0");
  FEA_CHECK_T(d_model >= 1 && n_heads >= 1 && d_ff >= 1, ConfigError,
              "encoder dims must be >= 1");
  FEA_CHECK_T(d_model % n_heads == 0, ConfigError,
              "d_model " << d_model << " not divisible by n_heads " << n_heads);
  FEA_CHECK_T(dropout >= 0.0 && dropout < 1.0, ConfigError,
              "dropout must be in [0, 1)");
  FEA_CHECK_T(max_frames >= 1, ConfigError, "max_frames must be >= 1");
}

SpanMask sample_span_mask(int t, double mask_prob, int span_length,
                          uint64_t rng_seed) {
  FEA_CHECK(t >= 1, "sample_span_mask: T must be >= 1");
  FEA_CHECK(mask_prob >= 0.0 && mask_prob <= 1.0,
            "sample_span_mask: mask_prob must be in [0, 1]");
  FEA_CHECK(span_length >= 1, "sample_span_mask: span_length must be >= 1");
  SpanMask mask;
  mask.mask_prob = mask_prob;
  mask.span_length = span_length;
  const int span = std::min(span_length, t);
  const int n_spans = static_cast<int>(
      std::llround(mask_prob * static_cast<double>(t) / span_length));
  if (n_spans == 0) return mask;

  Rng rng(rng_seed);
  std::vector<char> used(t, 0);
  // prefer non-overlapping placements so the expected masked fraction
  // tracks mask_prob instead of losing coverage to span collisions
  for (int i = 0; i < n_spans; ++i) {
    int start = 0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      start = static_cast<int>(rng.next_below(t - span + 1));
      bool clear = true;
      for (int j = start; j < start + span; ++j)
        if (used[j]) {
          clear = false;
          break;
        }
      if (clear) break;
    }
    for (int j = start; j < start + span; ++j) used[j] = 1;
  }
  for (int j = 0; j < t; ++j)
    if (used[j]) mask.masked_indices.push_back(j);
  return mask;
}

TransformerEncoder::TransformerEncoder(const EncoderConfig& cfg,
                                       uint64_t init_seed)
    : cfg_(cfg) {
  cfg_.validate();
  Rng rng(init_seed);
  const int d = cfg_.d_model;
  const double attn_bound = std::sqrt(1.0 / d);
  const double ff1_bound = std::sqrt(1.0 / d);
  const double ff2_bound = std::sqrt(1.0 / cfg_.d_ff);
  for (int i = 0; i < cfg_.n_layers; ++i) {
    const std::string base = "transformer.layer" + std::to_string(i);
    Layer l;
    l.ln1_g = add_param(params_, base + ".ln1.gamma", Mat(1, d, 1.0));
    l.ln1_b = add_param(params_, base + ".ln1.beta", Mat(1, d));
    l.wq = add_param(params_, base + ".attn.wq",
                     uniform_init(d, d, attn_bound, rng));
    l.bq = add_param(params_, base + ".attn.bq", Mat(1, d));
    l.wk = add_param(params_, base + ".attn.wk",
                     uniform_init(d, d, attn_bound, rng));
    l.bk = add_param(params_, base + ".attn.bk", Mat(1, d));
    l.wv = add_param(params_, base + ".attn.wv",
                     uniform_init(d, d, attn_bound, rng));
    l.bv = add_param(params_, base + ".attn.bv", Mat(1, d));
    l.wo = add_param(params_, base + ".attn.wo",
                     uniform_init(d, d, attn_bound, rng));
    l.bo = add_param(params_, base + ".attn.bo", Mat(1, d));
    l.ln2_g = add_param(params_, base + ".ln2.gamma", Mat(1, d, 1.0));
    l.ln2_b = add_param(params_, base + ".ln2.beta", Mat(1, d));
    l.ff1_w = add_param(params_, base + ".ff1.w",
                        uniform_init(d, cfg_.d_ff, ff1_bound, rng));
    l.ff1_b = add_param(params_, base + ".ff1.b", Mat(1, cfg_.d_ff));
    l.ff2_w = add_param(params_, base + ".ff2.w",
                        uniform_init(cfg_.d_ff, d, ff2_bound, rng));
    l.ff2_b = add_param(params_, base + ".ff2.b", Mat(1, d));
    layers_.push_back(l);
  }
  mask_emb_ = add_param(params_, "transformer.mask_emb",
                        uniform_init(1, d, 0.1, rng));
}

std::vector<Param*> TransformerEncoder::params() {
  std::vector<Param*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

Mat TransformerEncoder::sinusoidal_positions(int t, int d_model) {
  Mat pe(t, d_model);
  for (int pos = 0; pos < t; ++pos) {
    for (int i = 0; i < d_model / 2; ++i) {
      const double angle =
          pos / std::pow(10000.0, 2.0 * i / static_cast<double>(d_model));
      pe(pos, 2 * i) = std::sin(angle);
      if (2 * i + 1 < d_model) pe(pos, 2 * i + 1) = std::cos(angle);
    }
    if (d_model % 2 == 1) {
      const int i = d_model / 2;
      pe(pos, 2 * i) = std::sin(
          pos / std::pow(10000.0, 2.0 * i / static_cast<double>(d_model)));
    }
  }
  return pe;
}

ad::NodeRef TransformerEncoder::maybe_dropout(const ad::NodeRef& h,
                                              Rng* rng) const {
  if (rng == nullptr || cfg_.dropout <= 0.0) return h;
  Mat mask(h->val.rows(), h->val.cols());
  const double keep = 1.0 - cfg_.dropout;
  const double scale = 1.0 / keep;
  for (size_t i = 0; i < mask.size(); ++i)
    mask.data()[i] = (rng->next_double() < keep) ? scale : 0.0;
  return ad::mul_mask(h, std::move(mask));
}

ad::NodeRef TransformerEncoder::self_attention(const Layer& l,
                                               const ad::NodeRef& h) const {
  const int dh = cfg_.head_dim();
  auto q = ad::linear(h, ad::leaf(l.wq), ad::leaf(l.bq));
  auto k = ad::linear(h, ad::leaf(l.wk), ad::leaf(l.bk));
  auto v = ad::linear(h, ad::leaf(l.wv), ad::leaf(l.bv));
  std::vector<ad::NodeRef> heads;
  heads.reserve(cfg_.n_heads);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  for (int i = 0; i < cfg_.n_heads; ++i) {
    auto qi = ad::col_slice(q, i * dh, dh);
    auto ki = ad::col_slice(k, i * dh, dh);
    auto vi = ad::col_slice(v, i * dh, dh);
    auto scores = ad::scale(ad::matmul_nt(qi, ki), inv_sqrt);
    auto attn = ad::softmax_rows(scores);
    heads.push_back(ad::matmul(attn, vi));
  }
  auto ctx = (cfg_.n_heads == 1) ? heads[0] : ad::col_concat(heads);
  return ad::linear(ctx, ad::leaf(l.wo), ad::leaf(l.bo));
}

ad::NodeRef TransformerEncoder::encode(const ad::NodeRef& x,
                                       const std::optional<SpanMask>& mask,
                                       Rng* dropout_rng) const {
  const int t = x->val.rows();
  FEA_CHECK(x->val.cols() == cfg_.d_model,
            "encode: input D=" << x->val.cols() << " but d_model="
                               << cfg_.d_model);
  FEA_CHECK(t <= cfg_.max_frames, "encode: T=" << t << " exceeds max_frames="
                                               << cfg_.max_frames);
  ad::NodeRef h = x;
  if (mask.has_value() && !mask->masked_indices.empty()) {
    h = ad::replace_rows(h, mask->masked_indices, ad::leaf(mask_emb_));
  }
  h = ad::add(h, ad::constant(sinusoidal_positions(t, cfg_.d_model)));
  for (const Layer& l : layers_) {
    auto attn_in = ad::layer_norm(h, ad::leaf(l.ln1_g), ad::leaf(l.ln1_b));
    auto attn_out = maybe_dropout(self_attention(l, attn_in), dropout_rng);
    h = ad::add(h, attn_out);
    auto ff_in = ad::layer_norm(h, ad::leaf(l.ln2_g), ad::leaf(l.ln2_b));
    auto ff_mid = ad::gelu(ad::linear(ff_in, ad::leaf(l.ff1_w),
                                      ad::leaf(l.ff1_b)));
    auto ff_out = maybe_dropout(
        ad::linear(ff_mid, ad::leaf(l.ff2_w), ad::leaf(l.ff2_b)), dropout_rng);
    h = ad::add(h, ff_out);
  }
  return h;
}

CtcHead::CtcHead(int d_model, int vocab_size, uint64_t init_seed)
    : vocab_size_(vocab_size) {
  FEA_CHECK_T(vocab_size >= 2, ConfigError, "vocab must hold blank + letters");
  Rng rng(init_seed);
  const double bound = std::sqrt(1.0 / d_model);
  w_ = add_param(params_, "ctc_head.w",
                 uniform_init(d_model, vocab_size, bound, rng));
  b_ = add_param(params_, "ctc_head.b", Mat(1, vocab_size));
}

ad::NodeRef CtcHead::forward(const ad::NodeRef& h) const {
  return ad::log_softmax_rows(ad::linear(h, ad::leaf(w_), ad::leaf(b_)));
}

std::vector<Param*> CtcHead::params() { return {w_, b_}; }

PretrainHead::PretrainHead(int d_model, int n_clusters, uint64_t init_seed)
    : n_clusters_(n_clusters) {
  FEA_CHECK_T(n_clusters >= 2, ConfigError, "need at least 2 clusters");
  Rng rng(init_seed);
  const double bound = std::sqrt(1.0 / d_model);
  w_ = add_param(params_, "pretrain_head.w",
                 uniform_init(d_model, n_clusters, bound, rng));
  b_ = add_param(params_, "pretrain_head.b", Mat(1, n_clusters));
}

ad::NodeRef PretrainHead::forward(const ad::NodeRef& h) const {
  return ad::linear(h, ad::leaf(w_), ad::leaf(b_));
}

std::vector<Param*> PretrainHead::params() { return {w_, b_}; }

}  // namespace fea
