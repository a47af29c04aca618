// encoder/encoder.h

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

#ifndef FEA_ENCODER_ENCODER_H_
#define FEA_ENCODER_ENCODER_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fea/core/graph.h"
#include "fea/core/rng.h"

namespace fea {

struct EncoderConfig {
  int n_layers = 4;
  int d_model = 192;
  int n_heads = 4;
  int d_ff = 768;
  double dropout = 0.0;
  int max_frames = 1024;

  void validate() const;
  int head_dim() const { return d_model / n_heads; }
};

// Contiguous span masking for masked prediction.
struct SpanMask {
  double mask_prob = 0.0;
  int span_length = 1;
  std::vector<int> masked_indices;  // sorted, unique, within [0, T)
};

// round(mask_prob * T / span_length) spans with uniform starts; spans longer
// than T are clipped. Deterministic per seed.
SpanMask sample_span_mask(int t, double mask_prob, int span_length,
                          uint64_t rng_seed);

// Pre-norm Transformer stack with sinusoidal positions and a learned mask
// embedding that replaces masked input rows before the first layer. A
// zero-layer stack is the identity plus positions, which the tests lean on.
class TransformerEncoder {
 public:
  TransformerEncoder(const EncoderConfig& cfg, uint64_t init_seed);

  // x: [T x d_model]. dropout_rng non-null enables dropout (training mode).
  ad::NodeRef encode(const ad::NodeRef& x,
                     const std::optional<SpanMask>& mask = std::nullopt,
                     Rng* dropout_rng = nullptr) const;

  const EncoderConfig& config() const { return cfg_; }
  std::vector<Param*> params();

  static Mat sinusoidal_positions(int t, int d_model);

 private:
  struct Layer {
    Param *ln1_g, *ln1_b;
    Param *wq, *bq, *wk, *bk, *wv, *bv, *wo, *bo;
    Param *ln2_g, *ln2_b;
    Param *ff1_w, *ff1_b, *ff2_w, *ff2_b;
  };
  ad::NodeRef self_attention(const Layer& l, const ad::NodeRef& h) const;
  ad::NodeRef maybe_dropout(const ad::NodeRef& h, Rng* rng) const;

  EncoderConfig cfg_;
  std::vector<std::unique_ptr<Param>> params_;
  std::vector<Layer> layers_;
  Param* mask_emb_;
};

// Linear projection to per-frame log-probabilities over letters + blank.
class CtcHead {
 public:
  CtcHead(int d_model, int vocab_size, uint64_t init_seed);
  ad::NodeRef forward(const ad::NodeRef& h) const;  // log-softmax rows
  int vocab_size() const { return vocab_size_; }
  std::vector<Param*> params();

 private:
  int vocab_size_;
  std::vector<std::unique_ptr<Param>> params_;
  Param *w_, *b_;
};

// Linear projection to cluster logits for masked prediction.
class PretrainHead {
 public:
  PretrainHead(int d_model, int n_clusters, uint64_t init_seed);
  ad::NodeRef forward(const ad::NodeRef& h) const;  // raw logits
  int n_clusters() const { return n_clusters_; }
  std::vector<Param*> params();

 private:
  int n_clusters_;
  std::vector<std::unique_ptr<Param>> params_;
  Param *w_, *b_;
};

}  // namespace fea

#endif  // FEA_ENCODER_ENCODER_H_
