// pretrain/pretrain.cc

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

#include "fea/pretrain/pretrain.h"

#include <cmath>
#include <iostream>
#include <map>

#include "fea/core/error.h"
#include "fea/data/checkpoint.h"
#include "fea/features/fbank.h"
#include "fea/losses/losses.h"

namespace fea {

namespace {

// cluster ids for one utterance, cut to the waveform front-end length
std::vector<int> frame_labels_for(const EncoderModel& model,
                                  const std::vector<int>& labels_10ms,
                                  double label_stride_ms, int wave_frames) {
  const double target_stride =
      model.config().wave_frontend.stride_ms(model.config().sample_rate_hz);
  auto ids = resample_labels(labels_10ms, label_stride_ms, target_stride,
                             wave_frames);
  return ids;
}

}  // namespace

PretrainLabels prepare_labels(const RunConfig& cfg, const CorpusStore& train) {
  PretrainLabels out;
  std::vector<FeatureMatrix> mfccs;
  mfccs.reserve(train.size());
  for (size_t i = 0; i < train.size(); ++i) {
    const auto clip = train.utt(i).clip(cfg.model.sample_rate_hz);
    mfccs.push_back(add_deltas(compute_mfcc(clip, cfg.fbank, cfg.n_ceps)));
  }
  out.kmeans = kmeans_fit(mfccs, cfg.model.n_clusters, cfg.kmeans_iters,
                          hash_seed(cfg.seed, 0x5EEDull));
  for (size_t i = 0; i < train.size(); ++i)
    out.labels.emplace_back(train.utt(i).id,
                            assign_labels(out.kmeans, mfccs[i]));
  return out;
}

PretrainStepResult pretrain_step(
    EncoderModel& model, const std::vector<const CachedUtterance*>& batch,
    const std::vector<const std::vector<int>*>& labels, double label_stride_ms,
    double mask_prob, int mask_span, AdamW& opt, double lr,
    uint64_t step_seed) {
  FEA_CHECK(!batch.empty() && batch.size() == labels.size(),
            "pretrain_step: bad batch");
  model.zero_all_grads();

  PretrainStepResult result;
  ad::NodeRef total;
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto clip = batch[i]->clip(model.config().sample_rate_hz);
    auto wave_out = model.wave_frontend().forward(clip);
    const int t = wave_out.frames();
    auto ids = frame_labels_for(model, *labels[i], label_stride_ms, t);
    FEA_CHECK(static_cast<int>(ids.size()) == t,
              "pretrain_step: label stream shorter than front-end output for '"
                  << batch[i]->id << "'");
    SpanMask mask = sample_span_mask(t, mask_prob, mask_span,
                                     hash_seed(step_seed, 0x3A5Cull, i));
    result.masked_frames += static_cast<long long>(mask.masked_indices.size());
    if (mask.masked_indices.empty()) continue;
    auto h = model.transformer().encode(wave_out.node, mask);
    auto logits = model.pretrain_head().forward(h);
    auto ce = masked_cross_entropy(logits, ids, mask.masked_indices);
    total = total ? ad::add(total, ce) : ce;
  }
  if (!total) {
    // nothing masked anywhere: defined as loss 0 with no update
    result.loss = 0.0;
    result.updated = false;
    return result;
  }
  total = ad::scale(total, 1.0 / static_cast<double>(batch.size()));
  result.loss = ad::scalar_of(total);
  FEA_CHECK(std::isfinite(result.loss),
            "pretrain_step: non-finite loss " << result.loss
                                              << "; aborting");
  ad::backward(total);

  std::vector<Param*> update_set;
  for (const char* g : {"wave_frontend", "transformer", "pretrain_head"})
    for (Param* p : model.group(g)) update_set.push_back(p);
  opt.step(update_set, lr);
  result.updated = true;
  return result;
}

double masked_prediction_accuracy(
    EncoderModel& model, const std::vector<const CachedUtterance*>& utts,
    const std::vector<const std::vector<int>*>& labels, double label_stride_ms,
    double mask_prob, int mask_span, uint64_t seed) {
  long long correct = 0, total = 0;
  for (size_t i = 0; i < utts.size(); ++i) {
    const auto clip = utts[i]->clip(model.config().sample_rate_hz);
    auto wave_out = model.wave_frontend().forward(clip);
    const int t = wave_out.frames();
    auto ids = frame_labels_for(model, *labels[i], label_stride_ms, t);
    SpanMask mask =
        sample_span_mask(t, mask_prob, mask_span, hash_seed(seed, 0xACCull, i));
    if (mask.masked_indices.empty()) continue;
    auto h = model.transformer().encode(wave_out.node, mask);
    auto logits = model.pretrain_head().forward(h);
    for (int r : mask.masked_indices) {
      const double* row = logits->val.row(r);
      int best = 0;
      for (int c = 1; c < logits->val.cols(); ++c)
        if (row[c] > row[best]) best = c;
      if (best == ids[r]) ++correct;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

PretrainSummary run_pretrain(const RunConfig& cfg, const CorpusStore& train,
                             const CorpusStore& dev,
                             const PretrainLabels& labels,
                             const std::string& checkpoint_out,
                             const std::string& cmdline) {
  cfg.validate();
  FEA_CHECK_T(train.size() > 0, DataError, "pretrain: empty train corpus");

  std::map<std::string, const std::vector<int>*> by_id;
  for (const auto& [id, ids] : labels.labels) by_id[id] = &ids;

  EncoderModel model(cfg.model, hash_seed(cfg.seed, 0x10D31ull));
  AdamW opt(cfg.optimizer);

  PretrainSummary summary;
  summary.updates = cfg.pretrain_updates;
  for (long long update = 1; update <= cfg.pretrain_updates; ++update) {
    const auto idx = batch_indices(train.size(), cfg.batch_size, update,
                                   hash_seed(cfg.seed, 0x9471ull));
    std::vector<const CachedUtterance*> batch;
    std::vector<const std::vector<int>*> batch_labels;
    for (size_t i : idx) {
      const auto& utt = train.utt(i);
      auto it = by_id.find(utt.id);
      FEA_CHECK_T(it != by_id.end(), DataError,
                  "pretrain: no pseudo labels for utterance '" << utt.id
                                                               << "'");
      batch.push_back(&utt);
      batch_labels.push_back(it->second);
    }
    const double lr = cfg.pretrain_lr.at(update, cfg.pretrain_updates);
    const auto res =
        pretrain_step(model, batch, batch_labels, cfg.fbank.hop_ms,
                      cfg.mask_prob, cfg.mask_span, opt, lr,
                      hash_seed(cfg.seed, 0x57E9ull, update));
    if (update == 1) summary.first_loss = res.loss;
    summary.final_loss = res.loss;
    if (update % 50 == 0 || update == 1)
      std::cerr << "pretrain update " << update << "/" << cfg.pretrain_updates
                << " loss " << res.loss << " lr " << lr << "\n";
  }

  // held-out masked accuracy on dev utterances that have labels on the fly
  {
    std::vector<FeatureMatrix> dev_mfcc;
    std::vector<std::vector<int>> dev_labels;
    std::vector<const CachedUtterance*> dev_utts;
    const size_t n_eval = std::min<size_t>(dev.size(), 16);
    for (size_t i = 0; i < n_eval; ++i) {
      const auto clip = dev.utt(i).clip(cfg.model.sample_rate_hz);
      dev_mfcc.push_back(add_deltas(compute_mfcc(clip, cfg.fbank, cfg.n_ceps)));
      dev_labels.push_back(assign_labels(labels.kmeans, dev_mfcc.back()));
      dev_utts.push_back(&dev.utt(i));
    }
    std::vector<const std::vector<int>*> refs;
    for (const auto& l : dev_labels) refs.push_back(&l);
    summary.heldout_masked_accuracy = masked_prediction_accuracy(
        model, dev_utts, refs, cfg.fbank.hop_ms, cfg.mask_prob, cfg.mask_span,
        hash_seed(cfg.seed, 0xE7A1ull));
  }

  CheckpointMeta meta;
  meta.model_config = cfg.model;
  meta.train.update = cfg.pretrain_updates;
  meta.train.n_w = 0;
  meta.train.phase = "pretrain";
  meta.train.seed = cfg.seed;
  meta.cmdline = cmdline;
  meta.config_hash = cfg.hash();
  meta.parent_hash = 0;
  save_checkpoint(checkpoint_out, model, &opt, meta, &labels.kmeans);

  std::cerr << "pretrain done: loss " << summary.first_loss << " -> "
            << summary.final_loss << ", held-out masked accuracy "
            << summary.heldout_masked_accuracy << " (chance "
            << 1.0 / cfg.model.n_clusters << ")\n";
  return summary;
}

}  // namespace fea
