// encoder/model.cc

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

#include "fea/encoder/model.h"

#include <set>

#include "fea/core/error.h"
#include "fea/losses/vocab.h"

namespace fea {

ModelConfig ModelConfig::toy_defaults() {
  ModelConfig cfg;
  cfg.encoder = EncoderConfig{};  // 4 layers, d=192, 4 heads, d_ff=768
  cfg.wave_frontend = WaveFrontEndConfig::defaults(cfg.encoder.d_model);
  cfg.fbank_frontend.output_dim = cfg.encoder.d_model;
  cfg.vocab_size = letter_vocab().size();
  return cfg;
}

void ModelConfig::validate() const {
  FEA_CHECK_T(sample_rate_hz > 0, ConfigError, "sample rate must be positive");
  encoder.validate();
  wave_frontend.validate(sample_rate_hz);
  fbank_frontend.validate();
  FEA_CHECK_T(wave_frontend.output_dim == encoder.d_model, ConfigError,
              "waveform front-end output_dim " << wave_frontend.output_dim
                                               << " != d_model "
                                               << encoder.d_model);
  FEA_CHECK_T(fbank_frontend.output_dim == encoder.d_model, ConfigError,
              "fbank front-end output_dim " << fbank_frontend.output_dim
                                            << " != d_model "
                                            << encoder.d_model);
  FEA_CHECK_T(vocab_size >= 2 && n_clusters >= 2, ConfigError,
              "vocab_size and n_clusters must be >= 2");
}

const std::vector<std::string>& EncoderModel::group_names() {
  static const std::vector<std::string> names = {
      "wave_frontend", "fbank_frontend", "transformer", "ctc_head",
      "pretrain_head"};
  return names;
}

EncoderModel::EncoderModel(const ModelConfig& cfg, uint64_t init_seed)
    : cfg_(cfg) {
  cfg_.validate();
  wave_ = std::make_unique<WaveFrontEnd>(cfg_.wave_frontend,
                                         cfg_.sample_rate_hz,
                                         hash_seed(init_seed, 1));
  fbank_ = std::make_unique<FbankFrontEnd>(cfg_.fbank_frontend,
                                           hash_seed(init_seed, 2));
  transformer_ = std::make_unique<TransformerEncoder>(cfg_.encoder,
                                                      hash_seed(init_seed, 3));
  ctc_head_ = std::make_unique<CtcHead>(cfg_.encoder.d_model, cfg_.vocab_size,
                                        hash_seed(init_seed, 4));
  pretrain_head_ = std::make_unique<PretrainHead>(
      cfg_.encoder.d_model, cfg_.n_clusters, hash_seed(init_seed, 5));
  collect_groups();
  assert_partition();
}

void EncoderModel::collect_groups() {
  groups_.clear();
  groups_.emplace_back("wave_frontend", wave_->params());
  groups_.emplace_back("fbank_frontend", fbank_->params());
  groups_.emplace_back("transformer", transformer_->params());
  groups_.emplace_back("ctc_head", ctc_head_->params());
  groups_.emplace_back("pretrain_head", pretrain_head_->params());
}

void EncoderModel::assert_partition() const {
  std::set<const Param*> seen;
  std::set<std::string> names;
  size_t total = 0;
  for (const auto& [gname, params] : groups_) {
    for (const Param* p : params) {
      FEA_CHECK(seen.insert(p).second,
                "parameter group partition violated: '" << p->name
                                                        << "' in two groups");
      FEA_CHECK(names.insert(p->name).second,
                "duplicate parameter name '" << p->name << "'");
      ++total;
    }
  }
  FEA_CHECK(total == all_params().size(),
            "parameter group partition does not cover the model");
}

std::vector<Param*>& EncoderModel::group(const std::string& name) {
  for (auto& [gname, params] : groups_)
    if (gname == name) return params;
  throw Error("unknown parameter group '" + name + "'");
}

const std::vector<Param*>& EncoderModel::group(const std::string& name) const {
  for (const auto& [gname, params] : groups_)
    if (gname == name) return params;
  throw Error("unknown parameter group '" + name + "'");
}

std::vector<Param*> EncoderModel::all_params() const {
  std::vector<Param*> out;
  for (const auto& [gname, params] : groups_)
    out.insert(out.end(), params.begin(), params.end());
  return out;
}

uint64_t EncoderModel::group_checksum(const std::string& name) const {
  uint64_t h = 1469598103934665603ull;
  for (const Param* p : group(name)) {
    h ^= p->value.byte_hash();
    h *= 1099511628211ull;
  }
  return h;
}

void EncoderModel::reinit_fbank_frontend(uint64_t seed) {
  fbank_ = std::make_unique<FbankFrontEnd>(cfg_.fbank_frontend, seed);
  collect_groups();
  assert_partition();
}

void EncoderModel::zero_all_grads() {
  for (Param* p : all_params()) p->zero_grad();
}

}  // namespace fea
