// train/adapter.h

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

#ifndef FEA_TRAIN_ADAPTER_H_
#define FEA_TRAIN_ADAPTER_H_

#include <array>
#include <string>
#include <vector>

#include "fea/data/checkpoint.h"
#include "fea/data/run_config.h"
#include "fea/train/corpus.h"
#include "fea/train/metrics.h"
#include "fea/train/optimizer.h"
#include "fea/train/schedule.h"

namespace fea {

// What the fine-tuning loop trains. kAdapter is the two-stage front-end
// adapter; the other two are the comparison baselines (waveform front-end
// with the default recipe, and the straight Fbank replacement with no
// warm-up).
enum class RunMode { kAdapter, kWaveBaseline, kFbankNoAdapter };

const char* run_mode_name(RunMode mode);
std::string checkpoint_phase(RunMode mode);

// Wiring between the two front-ends for a target output stride.
// 20 ms: the waveform teacher is used as-is; 40 ms: its output is
// down-sampled by 2 before the L2 distance.
struct StridePlan {
  int target_stride_ms = 20;
  int wave_downsample_factor = 1;
};

StridePlan configure_stride(const ModelConfig& model, int target_stride_ms);

// One adapter update at schedule position sched.current_update():
//   warm-up (n <= N_w): CTC consumes the Fbank front-end output through a
//     stop-gradient, so CTC updates transformer + ctc_head only; the L2
//     distillation loss updates fbank_frontend only; the waveform teacher
//     is frozen and stop-gradded.
//   fine-tune (n > N_w): the waveform front-end is not evaluated at all;
//     loss is CTC; fbank_frontend + transformer + ctc_head all update.
// The waveform front-end parameter group is never passed to the optimizer.
LossBreakdown adapter_step(EncoderModel& model,
                           const std::vector<const CachedUtterance*>& batch,
                           const AdapterSchedule& sched, const RunConfig& cfg,
                           const StridePlan& plan, AdamW& opt, double lr,
                           uint64_t step_seed);

// CTC-only update through the chosen front-end path (the baselines, and
// stage 2 of the adapter reuses the fbank variant internally).
LossBreakdown baseline_step(EncoderModel& model,
                            const std::vector<const CachedUtterance*>& batch,
                            RunMode mode, const RunConfig& cfg, AdamW& opt,
                            double lr, long long step_n, uint64_t step_seed);

// Greedy-decode WER over a corpus (clean features, no masking).
struct EvalOutcome {
  WerCounts counts;
  double wer_percent = 0.0;
  std::vector<std::array<std::string, 3>> rows;  // id, ref, hyp
};

EvalOutcome evaluate_wer(EncoderModel& model, const CorpusStore& corpus,
                         RunMode mode);

void write_wer_report(const std::string& path, const EvalOutcome& outcome);

// Probe-batch Euclidean distance between the (down-sampled, length-aligned)
// waveform teacher and the Fbank front-end, evaluated read-only.
double probe_frontend_distance(EncoderModel& model,
                               const std::vector<const CachedUtterance*>&
                                   probe,
                               const StridePlan& plan);

struct RunOutputs {
  std::string checkpoint_path;
  std::string metrics_path;
  double final_dev_wer_percent = 0.0;
  long long wave_evals_in_stage2_steps = 0;  // purity counter, adapter mode
};

// The full fine-tuning loop: builds the model from a pre-trained
// checkpoint (wave_frontend + transformer restored, fbank_frontend and CTC
// head fresh), trains total_updates steps, evaluates dev WER on the
// configured interval, records per-update metrics, and checkpoints.
// resume_from continues a previous run of the same mode bitwise.
RunOutputs run_training(RunMode mode, const RunConfig& cfg,
                        const Manifest& train_manifest,
                        const Manifest& dev_manifest,
                        const std::string& checkpoint_in,
                        const std::string& out_dir, const std::string& cmdline,
                        const std::string& resume_from = "");

}  // namespace fea

#endif  // FEA_TRAIN_ADAPTER_H_
