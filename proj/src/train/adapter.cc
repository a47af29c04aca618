// train/adapter.cc

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

#include "fea/train/adapter.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fea/core/error.h"
#include "fea/features/specaug.h"
#include "fea/losses/ctc.h"

namespace fea {

namespace {

namespace fs = std::filesystem;

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<Param*> update_groups(EncoderModel& model,
                                  std::initializer_list<const char*> names) {
  std::vector<Param*> out;
  for (const char* g : names)
    for (Param* p : model.group(g)) out.push_back(p);
  return out;
}

void copy_group_values(const EncoderModel& src, EncoderModel& dst,
                       const std::string& gname) {
  const auto& from = src.group(gname);
  auto& to = dst.group(gname);
  FEA_CHECK(from.size() == to.size(),
            "cannot copy group '" << gname << "': tensor count mismatch");
  for (size_t i = 0; i < from.size(); ++i) {
    FEA_CHECK_T(from[i]->value.same_shape(to[i]->value), CheckpointError,
                "cannot copy '" << from[i]->name << "': shape mismatch");
    to[i]->value = from[i]->value;
  }
}

}  // namespace

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kAdapter: return "adapter";
    case RunMode::kWaveBaseline: return "wave";
    case RunMode::kFbankNoAdapter: return "fbank_noadapter";
  }
  return "?";
}

std::string checkpoint_phase(RunMode mode) {
  switch (mode) {
    case RunMode::kAdapter: return "adapt";
    case RunMode::kWaveBaseline: return "finetune_wave";
    case RunMode::kFbankNoAdapter: return "finetune_fbank_noadapter";
  }
  return "?";
}

StridePlan configure_stride(const ModelConfig& model, int target_stride_ms) {
  FEA_CHECK_T(target_stride_ms == 20 || target_stride_ms == 40, ConfigError,
              "unsupported target stride " << target_stride_ms
                                           << " ms (supported: 20, 40)");
  const double wave_stride =
      model.wave_frontend.stride_ms(model.sample_rate_hz);
  const double ratio = target_stride_ms / wave_stride;
  const int factor = static_cast<int>(ratio + 0.5);
  FEA_CHECK_T(factor >= 1 && std::fabs(ratio - factor) < 1e-9, ConfigError,
              "target stride " << target_stride_ms
                               << " ms is not a multiple of the waveform "
                                  "front-end stride "
                               << wave_stride << " ms");
  FEA_CHECK_T(model.fbank_frontend.subsample_factor * 10 == target_stride_ms,
              ConfigError,
              "fbank front-end subsample_factor "
                  << model.fbank_frontend.subsample_factor
                  << " does not realize " << target_stride_ms
                  << " ms on the 10 ms hop");
  StridePlan plan;
  plan.target_stride_ms = target_stride_ms;
  plan.wave_downsample_factor = factor;
  return plan;
}

LossBreakdown adapter_step(EncoderModel& model,
                           const std::vector<const CachedUtterance*>& batch,
                           const AdapterSchedule& sched, const RunConfig& cfg,
                           const StridePlan& plan, AdamW& opt, double lr,
                           uint64_t step_seed) {
  FEA_CHECK(!batch.empty(), "adapter_step: empty batch");
  const long long n = sched.current_update();
  const Regime regime = sched.regime();
  const long long wave_evals_before = model.wave_frontend().eval_count();
  model.zero_all_grads();

  Rng drop_rng(hash_seed(step_seed, 0xD0ull));
  Rng* dropout =
      model.config().encoder.dropout > 0.0 ? &drop_rng : nullptr;
  const bool specaug_on =
      cfg.specaug_enabled &&
      (regime == Regime::kFinetune || cfg.specaug_in_warmup);

  ad::NodeRef ctc_sum, l2_sum;
  for (size_t i = 0; i < batch.size(); ++i) {
    const CachedUtterance& utt = *batch[i];
    FeatureMatrix feats = utt.fbank_clean;
    if (specaug_on)
      feats = apply_specaug(feats, cfg.specaug,
                            hash_seed(step_seed, 0x57ECull, i));
    auto fb_out = model.fbank_frontend().forward(feats);

    // During warm-up the CTC path sees the Fbank activations through a
    // stop-gradient, so its gradient reaches transformer + ctc_head only.
    ad::NodeRef enc_in =
        (regime == Regime::kWarmup) ? ad::stop_grad(fb_out.node) : fb_out.node;
    auto h = model.transformer().encode(enc_in, std::nullopt, dropout);
    auto logp = model.ctc_head().forward(h);
    auto lc = ctc_loss(logp, utt.transcript.token_ids);
    ctc_sum = ctc_sum ? ad::add(ctc_sum, lc) : lc;

    if (regime == Regime::kWarmup) {
      auto wave_out =
          model.wave_frontend().forward(utt.clip(model.config().sample_rate_hz));
      auto wave_ds = downsample_frames(wave_out, plan.wave_downsample_factor);
      auto [wave_al, fb_al] = align_lengths(wave_ds, fb_out);
      auto l2 = l2_frontend_loss(wave_al.node, fb_al.node);
      l2_sum = l2_sum ? ad::add(l2_sum, l2) : l2;
    }
  }

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  LossBreakdown out;
  out.step_n = n;
  out.regime = regime;
  auto ctc_mean = ad::scale(ctc_sum, inv_b);
  out.l_ctc = ad::scalar_of(ctc_mean);
  ad::NodeRef total = ctc_mean;
  if (regime == Regime::kWarmup) {
    auto l2_term = ad::scale(l2_sum, inv_b * cfg.l2_weight);
    out.l_l2 = ad::scalar_of(l2_term);
    total = ad::add(ctc_mean, l2_term);
  }
  out.l_total = ad::scalar_of(total);
  FEA_CHECK(std::isfinite(out.l_total),
            "adapter_step: non-finite loss at update " << n << " (l_ctc="
                << out.l_ctc << ", l_l2=" << out.l_l2 << "); aborting");

  ad::backward(total);
  opt.step(update_groups(model, {"fbank_frontend", "transformer", "ctc_head"}),
           lr);

  if (regime == Regime::kFinetune) {
    FEA_CHECK(model.wave_frontend().eval_count() == wave_evals_before,
              "stage-2 purity violated: waveform front-end evaluated inside "
              "a fine-tune step");
  }
  return out;
}

LossBreakdown baseline_step(EncoderModel& model,
                            const std::vector<const CachedUtterance*>& batch,
                            RunMode mode, const RunConfig& cfg, AdamW& opt,
                            double lr, long long step_n, uint64_t step_seed) {
  FEA_CHECK(!batch.empty(), "baseline_step: empty batch");
  FEA_CHECK(mode != RunMode::kAdapter,
            "baseline_step: use adapter_step for adapter runs");
  model.zero_all_grads();

  Rng drop_rng(hash_seed(step_seed, 0xD0ull));
  Rng* dropout =
      model.config().encoder.dropout > 0.0 ? &drop_rng : nullptr;

  ad::NodeRef ctc_sum;
  for (size_t i = 0; i < batch.size(); ++i) {
    const CachedUtterance& utt = *batch[i];
    ad::NodeRef h;
    if (mode == RunMode::kWaveBaseline) {
      auto wave_out =
          model.wave_frontend().forward(utt.clip(model.config().sample_rate_hz));
      // default-recipe masking on the front-end output during fine-tuning
      std::optional<SpanMask> mask;
      if (cfg.wave_ft_mask_prob > 0.0) {
        mask = sample_span_mask(wave_out.frames(), cfg.wave_ft_mask_prob,
                                cfg.wave_ft_mask_span,
                                hash_seed(step_seed, 0x3A5Eull, i));
      }
      h = model.transformer().encode(wave_out.node, mask, dropout);
    } else {
      FeatureMatrix feats = utt.fbank_clean;
      if (cfg.specaug_enabled)
        feats = apply_specaug(feats, cfg.specaug,
                              hash_seed(step_seed, 0x57ECull, i));
      auto fb_out = model.fbank_frontend().forward(feats);
      h = model.transformer().encode(fb_out.node, std::nullopt, dropout);
    }
    auto logp = model.ctc_head().forward(h);
    auto lc = ctc_loss(logp, utt.transcript.token_ids);
    ctc_sum = ctc_sum ? ad::add(ctc_sum, lc) : lc;
  }

  auto ctc_mean = ad::scale(ctc_sum, 1.0 / static_cast<double>(batch.size()));
  LossBreakdown out;
  out.step_n = step_n;
  out.regime = Regime::kFinetune;
  out.l_ctc = ad::scalar_of(ctc_mean);
  out.l_l2 = 0.0;
  out.l_total = out.l_ctc;
  FEA_CHECK(std::isfinite(out.l_total),
            "baseline_step: non-finite loss at update " << step_n
                                                        << "; aborting");
  ad::backward(ctc_mean);

  // The waveform front-end stays frozen under the default recipe; only the
  // backbone and head update on the wave baseline.
  if (mode == RunMode::kWaveBaseline) {
    opt.step(update_groups(model, {"transformer", "ctc_head"}), lr);
  } else {
    opt.step(
        update_groups(model, {"fbank_frontend", "transformer", "ctc_head"}),
        lr);
  }
  return out;
}

EvalOutcome evaluate_wer(EncoderModel& model, const CorpusStore& corpus,
                         RunMode mode) {
  EvalOutcome out;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const CachedUtterance& utt = corpus.utt(i);
    ad::NodeRef h;
    if (mode == RunMode::kWaveBaseline) {
      auto wave_out =
          model.wave_frontend().forward(utt.clip(model.config().sample_rate_hz));
      h = model.transformer().encode(wave_out.node);
    } else {
      auto fb_out = model.fbank_frontend().forward(utt.fbank_clean);
      h = model.transformer().encode(fb_out.node);
    }
    auto logp = model.ctc_head().forward(h);
    const Transcript hyp = ctc_greedy_decode(logp->val);
    out.counts += wer_counts(hyp.text, utt.transcript.text);
    out.rows.push_back({utt.id, utt.transcript.text, hyp.text});
  }
  out.wer_percent = 100.0 * out.counts.wer();
  return out;
}

void write_wer_report(const std::string& path, const EvalOutcome& outcome) {
  std::ofstream os(path);
  FEA_CHECK_T(os.good(), DataError, "cannot open '" << path << "' for write");
  for (const auto& row : outcome.rows)
    os << row[0] << '\t' << row[1] << '\t' << row[2] << '\n';
  os << wer_summary_line(outcome.counts) << '\n';
  FEA_CHECK_T(os.good(), DataError, "failed writing '" << path << "'");
}

double probe_frontend_distance(
    EncoderModel& model, const std::vector<const CachedUtterance*>& probe,
    const StridePlan& plan) {
  double sum = 0.0;
  for (const CachedUtterance* utt : probe) {
    auto wave_out =
        model.wave_frontend().forward(utt->clip(model.config().sample_rate_hz));
    auto wave_ds = downsample_frames(wave_out, plan.wave_downsample_factor);
    auto fb_out = model.fbank_frontend().forward(utt->fbank_clean);
    auto [wave_al, fb_al] = align_lengths(wave_ds, fb_out);
    sum += frontend_euclid_distance(wave_al.node->val, fb_al.node->val);
  }
  return sum / static_cast<double>(probe.size());
}

RunOutputs run_training(RunMode mode, const RunConfig& cfg,
                        const Manifest& train_manifest,
                        const Manifest& dev_manifest,
                        const std::string& checkpoint_in,
                        const std::string& out_dir, const std::string& cmdline,
                        const std::string& resume_from) {
  cfg.validate();
  FEA_CHECK_T(!train_manifest.empty(), DataError, "empty training manifest");
  FEA_CHECK_T(!dev_manifest.empty(), DataError, "empty dev manifest");
  fs::create_directories(out_dir);
  cfg.write_json_file((fs::path(out_dir) / "resolved_config.json").string());

  const StridePlan plan = configure_stride(cfg.model, cfg.target_stride_ms);
  CorpusStore train(train_manifest, cfg.fbank, cfg.model.sample_rate_hz);
  CorpusStore dev(dev_manifest, cfg.fbank, cfg.model.sample_rate_hz);

  const long long per_epoch = updates_per_epoch(train.size(), cfg.batch_size);
  long long n_w_updates = 0;
  if (mode == RunMode::kAdapter) {
    n_w_updates = (cfg.n_w_unit == "epochs") ? cfg.n_w * per_epoch : cfg.n_w;
  }

  std::unique_ptr<EncoderModel> model;
  AdamW opt(cfg.optimizer);
  long long start_update = 0;
  uint64_t parent_hash = 0;

  if (!resume_from.empty()) {
    LoadedCheckpoint rc = load_checkpoint(resume_from);
    FEA_CHECK_T(rc.meta.train.phase == checkpoint_phase(mode),
                CheckpointError,
                "cannot resume a '" << rc.meta.train.phase
                                    << "' checkpoint in mode '"
                                    << checkpoint_phase(mode) << "'");
    check_model_config_compatible(rc.meta.model_config, cfg.model);
    // resuming restores fbank_frontend parameters too, so its geometry
    // must match exactly
    FEA_CHECK_T(rc.meta.model_config.fbank_frontend.subsample_factor ==
                        cfg.model.fbank_frontend.subsample_factor &&
                    rc.meta.model_config.fbank_frontend.n_mels ==
                        cfg.model.fbank_frontend.n_mels &&
                    rc.meta.model_config.fbank_frontend.hidden_channels ==
                        cfg.model.fbank_frontend.hidden_channels,
                ConfigError,
                "model config mismatch on field 'fbank_frontend' (resume "
                "needs identical front-end geometry)");
    FEA_CHECK_T(rc.meta.train.n_w == n_w_updates, ConfigError,
                "resume: warm-up boundary mismatch (checkpoint "
                    << rc.meta.train.n_w << ", config " << n_w_updates << ")");
    model = std::move(rc.model);
    opt.state() = std::move(rc.optimizer_state);
    start_update = rc.meta.train.update;
    parent_hash = rc.meta.parent_hash;
  } else {
    LoadedCheckpoint parent = load_checkpoint(checkpoint_in);
    check_model_config_compatible(parent.meta.model_config, cfg.model);
    model = std::make_unique<EncoderModel>(cfg.model,
                                           hash_seed(cfg.seed, 0xF00Dull));
    // the pre-trained pieces carry over; the Fbank front-end and the CTC
    // head start fresh
    copy_group_values(*parent.model, *model, "wave_frontend");
    copy_group_values(*parent.model, *model, "transformer");
    copy_group_values(*parent.model, *model, "pretrain_head");
    model->reinit_fbank_frontend(hash_seed(cfg.seed, 0xFB01ull));
    parent_hash = checkpoint_file_hash(checkpoint_in);
  }

  AdapterSchedule sched = AdapterSchedule::from_updates(n_w_updates);

  std::vector<const CachedUtterance*> probe;
  for (size_t i = 0;
       i < std::min<size_t>(dev.size(), static_cast<size_t>(cfg.probe_utts));
       ++i)
    probe.push_back(&dev.utt(i));

  const uint64_t wave_checksum_start = model->group_checksum("wave_frontend");
  MetricsWriter metrics((fs::path(out_dir) / "metrics.csv").string());

  auto save = [&](const std::string& name, long long update) {
    CheckpointMeta meta;
    meta.model_config = cfg.model;
    meta.train.update = update;
    meta.train.n_w = n_w_updates;
    meta.train.phase = checkpoint_phase(mode);
    meta.train.seed = cfg.seed;
    meta.cmdline = cmdline;
    meta.config_hash = cfg.hash();
    meta.parent_hash = parent_hash;
    const std::string path = (fs::path(out_dir) / name).string();
    save_checkpoint(path, *model, &opt, meta);
    return path;
  };

  RunOutputs outputs;
  outputs.metrics_path = metrics.path();
  double last_wer = -1.0;

  for (long long update = start_update + 1; update <= cfg.total_updates;
       ++update) {
    sched.set_update(update);
    // optionally restart the Fbank front-end's optimizer moments where its
    // gradient source flips from L2 to CTC
    if (cfg.reset_fbank_optimizer_at_boundary &&
        mode == RunMode::kAdapter && n_w_updates > 0 &&
        update == n_w_updates + 1) {
      opt.reset_state(model->group("fbank_frontend"));
    }

    const auto idx =
        batch_indices(train.size(), cfg.batch_size, update, cfg.seed);
    std::vector<const CachedUtterance*> batch;
    for (size_t i : idx) batch.push_back(&train.utt(i));

    const double lr = cfg.lr.at(update, cfg.total_updates);
    const uint64_t step_seed = hash_seed(cfg.seed, 0x57E2ull, update);
    const double t0 = now_s();

    const long long stage2_wave_evals_before =
        model->wave_frontend().eval_count();
    LossBreakdown lb;
    if (mode == RunMode::kAdapter) {
      lb = adapter_step(*model, batch, sched, cfg, plan, opt, lr, step_seed);
    } else {
      lb = baseline_step(*model, batch, mode, cfg, opt, lr, update, step_seed);
    }
    if (mode == RunMode::kAdapter && sched.regime() == Regime::kFinetune) {
      outputs.wave_evals_in_stage2_steps +=
          model->wave_frontend().eval_count() - stage2_wave_evals_before;
    }

    FEA_CHECK(model->group_checksum("wave_frontend") == wave_checksum_start,
              "frozen-teacher invariant violated at update " << update);

    MetricsRow row;
    row.step = update;
    row.regime = lb.regime;
    row.l_ctc = lb.l_ctc;
    row.l_l2 = lb.l_l2;
    row.frontend_l2 = (mode == RunMode::kWaveBaseline)
                          ? 0.0
                          : probe_frontend_distance(*model, probe, plan);
    if (update % cfg.eval_interval == 0 || update == cfg.total_updates) {
      const auto eval = evaluate_wer(*model, dev, mode);
      row.dev_wer = eval.wer_percent;
      last_wer = eval.wer_percent;
      std::cerr << run_mode_name(mode) << " update " << update << "/"
                << cfg.total_updates << " " << regime_name(lb.regime)
                << " l_ctc " << lb.l_ctc << " l_l2 " << lb.l_l2 << " dev WER "
                << eval.wer_percent << "%\n";
    }
    row.wall_s = now_s() - t0;
    metrics.write(row);

    if (cfg.save_interval > 0 && update % cfg.save_interval == 0 &&
        update != cfg.total_updates) {
      save("checkpoint_" + std::to_string(update) + ".bin", update);
    }
  }

  if (last_wer < 0.0) {
    last_wer = evaluate_wer(*model, dev, mode).wer_percent;
  }
  outputs.final_dev_wer_percent = last_wer;
  outputs.checkpoint_path = save("checkpoint_final.bin", cfg.total_updates);
  return outputs;
}

}  // namespace fea
