// data/run_config.h

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

#ifndef FEA_DATA_RUN_CONFIG_H_
#define FEA_DATA_RUN_CONFIG_H_

#include <string>

#include "fea/encoder/model.h"
#include "fea/features/feature_types.h"
#include "fea/train/optimizer.h"
#include "fea/train/schedule.h"

namespace fea {

// Every knob for pre-training, adaptation, and the baselines. Parsed from a
// JSON file; cross-field consistency is validated before any model is
// allocated.
struct RunConfig {
  ModelConfig model = ModelConfig::toy_defaults();
  FbankConfig fbank;

  // SpecAug on the Fbank path. Applied in fine-tuning; during the adapter
  // warm-up it defaults off so the distillation target stays clean.
  SpecAugPolicy specaug = {2, 10, 2, 8, 0.0};
  bool specaug_enabled = true;
  bool specaug_in_warmup = false;

  // masking on the waveform path during fine-tuning (the default recipe's
  // counterpart of SpecAug)
  double wave_ft_mask_prob = 0.2;
  int wave_ft_mask_span = 5;

  // adapter schedule
  long long n_w = 200;
  std::string n_w_unit = "updates";  // "updates" | "epochs"
  int target_stride_ms = 20;
  double l2_weight = 1.0;
  // Fresh Adam moments for the Fbank front-end at the stage boundary. Off
  // by default: the first post-reset steps are maximal-size and visibly
  // kick the front-end away from the distilled solution.
  bool reset_fbank_optimizer_at_boundary = false;

  // training loop
  long long total_updates = 600;
  int batch_size = 4;
  uint64_t seed = 1;
  long long eval_interval = 50;
  long long save_interval = 0;  // 0: final checkpoint only
  int probe_utts = 2;           // fixed probe batch for the distance curve
  TriStageLr lr;
  AdamW::Config optimizer;

  // pre-training
  long long pretrain_updates = 400;
  WarmupConstantLr pretrain_lr;
  double mask_prob = 0.5;
  int mask_span = 10;
  int n_ceps = 13;
  int kmeans_iters = 25;

  void validate() const;
  uint64_t hash() const;

  std::string to_json_string() const;
  static RunConfig from_json_string(const std::string& text);
  static RunConfig from_json_file(const std::string& path);
  void write_json_file(const std::string& path) const;
};

// Field-by-field comparison of model configs, throwing a ConfigError that
// names the first mismatching field. Used when resuming from checkpoints.
void check_model_config_compatible(const ModelConfig& expected,
                                   const ModelConfig& actual);

}  // namespace fea

#endif  // FEA_DATA_RUN_CONFIG_H_
