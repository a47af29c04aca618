// encoder/model.h

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

#ifndef FEA_ENCODER_MODEL_H_
#define FEA_ENCODER_MODEL_H_

#include <memory>
#include <string>
#include <vector>

#include "fea/encoder/encoder.h"
#include "fea/frontends/frontends.h"

namespace fea {

// Everything the model needs to be rebuilt from a checkpoint snapshot.
struct ModelConfig {
  int sample_rate_hz = 16000;
  WaveFrontEndConfig wave_frontend;
  FbankFrontEndConfig fbank_frontend;
  EncoderConfig encoder;
  int vocab_size = 29;
  int n_clusters = 32;

  static ModelConfig toy_defaults();
  void validate() const;
};

// Parameter container for the full stack. Every trainable parameter belongs
// to exactly one named group; gradient gating and freezing are implemented
// purely in terms of these groups.
class EncoderModel {
 public:
  static const std::vector<std::string>& group_names();

  EncoderModel(const ModelConfig& cfg, uint64_t init_seed);

  const ModelConfig& config() const { return cfg_; }

  WaveFrontEnd& wave_frontend() { return *wave_; }
  const WaveFrontEnd& wave_frontend() const { return *wave_; }
  FbankFrontEnd& fbank_frontend() { return *fbank_; }
  TransformerEncoder& transformer() { return *transformer_; }
  const TransformerEncoder& transformer() const { return *transformer_; }
  CtcHead& ctc_head() { return *ctc_head_; }
  PretrainHead& pretrain_head() { return *pretrain_head_; }

  std::vector<Param*>& group(const std::string& name);
  const std::vector<Param*>& group(const std::string& name) const;
  std::vector<Param*> all_params() const;

  // Combined byte hash of a group's parameter values.
  uint64_t group_checksum(const std::string& name) const;

  // Re-draws a group's parameters from a fresh seed (used to start the
  // Fbank front-end from scratch on top of a pre-trained checkpoint).
  void reinit_fbank_frontend(uint64_t seed);

  void zero_all_grads();

 private:
  void collect_groups();
  void assert_partition() const;

  ModelConfig cfg_;
  std::unique_ptr<WaveFrontEnd> wave_;
  std::unique_ptr<FbankFrontEnd> fbank_;
  std::unique_ptr<TransformerEncoder> transformer_;
  std::unique_ptr<CtcHead> ctc_head_;
  std::unique_ptr<PretrainHead> pretrain_head_;
  std::vector<std::pair<std::string, std::vector<Param*>>> groups_;
};

}  // namespace fea

#endif  // FEA_ENCODER_MODEL_H_
