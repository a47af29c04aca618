// data/checkpoint.h

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

#ifndef FEA_DATA_CHECKPOINT_H_
#define FEA_DATA_CHECKPOINT_H_

#include <map>
#include <memory>
#include <string>

#include "fea/encoder/model.h"
#include "fea/pretrain/kmeans.h"
#include "fea/train/optimizer.h"

namespace fea {

// Schedule position and seeding at save time. Updates count completed
// optimizer steps; a resumed run continues at update + 1.
struct TrainState {
  long long update = 0;
  long long n_w = 0;
  std::string phase;  // "pretrain" | "adapt" | "finetune_wave" | ...
  uint64_t seed = 0;
};

struct CheckpointMeta {
  ModelConfig model_config;
  TrainState train;
  std::string cmdline;       // provenance: how this file was produced
  uint64_t config_hash = 0;  // resolved RunConfig hash
  uint64_t parent_hash = 0;  // file hash of the checkpoint this run started from
};

struct LoadedCheckpoint {
  CheckpointMeta meta;
  std::unique_ptr<EncoderModel> model;
  std::map<std::string, AdamW::ParamState> optimizer_state;
  KMeansModel kmeans;  // k() == 0 when the section is absent

  bool has_kmeans() const { return kmeans.k() > 0; }
};

// Single-file container: versioned header, JSON metadata, raw parameter
// groups, optimizer moments, optional K-means centroids, trailing integrity
// hash. Written atomically (temp file + rename), so an interrupted save
// leaves any previous checkpoint intact.
void save_checkpoint(const std::string& path, const EncoderModel& model,
                     const AdamW* optimizer, const CheckpointMeta& meta,
                     const KMeansModel* kmeans = nullptr);

// Rebuilds the model from the stored config and restores every parameter
// bitwise. Throws CheckpointError on bad magic, version, truncation, hash
// mismatch, or parameter shape mismatch (naming the parameter).
LoadedCheckpoint load_checkpoint(const std::string& path);

// FNV-1a over a whole file; provenance links use this.
uint64_t checkpoint_file_hash(const std::string& path);

namespace detail {
// Test hook: when >= 0, save_checkpoint writes only this many bytes to the
// temp file and then fails, simulating a mid-write crash.
extern long long g_checkpoint_fault_after_bytes;
}  // namespace detail

}  // namespace fea

#endif  // FEA_DATA_CHECKPOINT_H_
