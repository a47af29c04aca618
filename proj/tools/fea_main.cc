// tools/fea_main.cc

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

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fea/core/error.h"
#include "fea/data/checkpoint.h"
#include "fea/data/manifest.h"
#include "fea/data/run_config.h"
#include "fea/data/svg_plot.h"
#include "fea/data/synth.h"
#include "fea/pretrain/pretrain.h"
#include "fea/train/adapter.h"
#include "fea/train/metrics.h"

namespace fs = std::filesystem;
using namespace fea;

namespace {

std::string join_argv(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return RunConfig{};
  return RunConfig::from_json_file(path);
}

RunMode mode_for_eval(const std::string& phase, const std::string& override) {
  if (override == "wave") return RunMode::kWaveBaseline;
  if (override == "fbank") return RunMode::kFbankNoAdapter;
  if (!override.empty())
    throw ConfigError("unknown --frontend '" + override +
                      "' (use wave or fbank)");
  if (phase == "finetune_wave") return RunMode::kWaveBaseline;
  if (phase == "adapt" || phase == "finetune_fbank_noadapter")
    return RunMode::kFbankNoAdapter;
  throw ConfigError("checkpoint phase '" + phase +
                    "' has no trained recognizer; pass --frontend explicitly");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Speech SSL front-end adapter toolkit: toy HuBERT-style pre-training "
      "on waveform input, then Fbank front-end adaptation with L2 "
      "distillation warm-up and CTC fine-tuning."};
  app.require_subcommand(1);
  const std::string cmdline = join_argv(argc, argv);

  // ---- synth ----
  auto* synth = app.add_subcommand(
      "synth", "Generate the synthetic spoken-token corpus");
  std::string synth_out = "corpus";
  SynthSpec spec;
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_option("--n-train", spec.n_train, "Training utterances");
  synth->add_option("--n-dev", spec.n_dev, "Dev utterances");
  synth->add_option("--n-test", spec.n_test, "Test utterances");
  synth->add_option("--n-letters", spec.n_letters, "Distinct spoken tokens");
  synth->add_option("--seed", spec.seed, "Corpus seed");

  // ---- prepare-labels ----
  auto* prep = app.add_subcommand(
      "prepare-labels", "MFCC + K-means pseudo labels for pre-training");
  std::string prep_config, prep_manifest, prep_out = "labels";
  prep->add_option("--config", prep_config, "RunConfig JSON");
  prep->add_option("--manifest", prep_manifest, "Training manifest (JSONL)")
      ->required();
  prep->add_option("--out", prep_out, "Output directory");

  // ---- pretrain ----
  auto* pre = app.add_subcommand(
      "pretrain", "Masked-prediction pre-training of the waveform model");
  std::string pre_config, pre_train, pre_dev, pre_out = "pretrain";
  std::string pre_labels, pre_kmeans;
  pre->add_option("--config", pre_config, "RunConfig JSON");
  pre->add_option("--train", pre_train, "Training manifest")->required();
  pre->add_option("--dev", pre_dev, "Dev manifest")->required();
  pre->add_option("--labels", pre_labels,
                  "Pseudo-label file from prepare-labels (else computed)");
  pre->add_option("--kmeans", pre_kmeans,
                  "K-means file from prepare-labels (with --labels)");
  pre->add_option("--out", pre_out, "Output directory");

  // ---- adapt ----
  auto* adapt = app.add_subcommand(
      "adapt", "Two-stage front-end adapter fine-tuning (L2 warm-up + CTC)");
  std::string ad_config, ad_train, ad_dev, ad_init, ad_out = "adapt";
  std::string ad_resume;
  adapt->add_option("--config", ad_config, "RunConfig JSON");
  adapt->add_option("--train", ad_train, "Training manifest")->required();
  adapt->add_option("--dev", ad_dev, "Dev manifest")->required();
  adapt->add_option("--init", ad_init, "Pre-trained checkpoint");
  adapt->add_option("--resume", ad_resume, "Checkpoint to resume from");
  adapt->add_option("--out", ad_out, "Output directory");

  // ---- finetune ----
  auto* ft = app.add_subcommand(
      "finetune", "Baseline CTC fine-tuning without the adapter");
  std::string ft_config, ft_train, ft_dev, ft_init, ft_out = "finetune";
  std::string ft_frontend = "wave", ft_resume;
  ft->add_option("--config", ft_config, "RunConfig JSON");
  ft->add_option("--train", ft_train, "Training manifest")->required();
  ft->add_option("--dev", ft_dev, "Dev manifest")->required();
  ft->add_option("--init", ft_init, "Pre-trained checkpoint");
  ft->add_option("--frontend", ft_frontend, "wave | fbank_noadapter");
  ft->add_option("--resume", ft_resume, "Checkpoint to resume from");
  ft->add_option("--out", ft_out, "Output directory");

  // ---- eval ----
  auto* ev = app.add_subcommand(
      "eval", "Greedy-decode a split and report WER");
  std::string ev_config, ev_ckpt, ev_manifest, ev_out, ev_frontend;
  ev->add_option("--config", ev_config, "RunConfig JSON");
  ev->add_option("--checkpoint", ev_ckpt, "Trained checkpoint")->required();
  ev->add_option("--manifest", ev_manifest, "Manifest to decode")->required();
  ev->add_option("--out", ev_out, "Report file (default: stdout only)");
  ev->add_option("--frontend", ev_frontend,
                 "Override the front-end path: wave | fbank");

  // ---- plot ----
  auto* plot = app.add_subcommand(
      "plot", "Render metrics CSVs as SVG learning curves");
  std::string plot_out = "plots";
  std::vector<std::string> plot_csvs;
  plot->add_option("--out", plot_out, "Output directory");
  plot->add_option("csvs", plot_csvs, "Metrics CSV files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      synth_corpus(spec, synth_out);
      std::cout << "wrote corpus under " << synth_out << "\n";
      return 0;
    }

    if (*prep) {
      RunConfig cfg = load_config_or_default(prep_config);
      cfg.validate();
      fs::create_directories(prep_out);
      cfg.write_json_file((fs::path(prep_out) / "resolved_config.json")
                              .string());
      const Manifest manifest = load_manifest(prep_manifest);
      CorpusStore store(manifest, cfg.fbank, cfg.model.sample_rate_hz);
      const PretrainLabels labels = prepare_labels(cfg, store);
      write_label_file((fs::path(prep_out) / "labels.tsv").string(),
                       labels.labels);
      save_kmeans((fs::path(prep_out) / "kmeans.bin").string(), labels.kmeans);
      std::cout << "wrote " << labels.labels.size() << " label rows and "
                << labels.kmeans.k() << " centroids under " << prep_out
                << "\n";
      return 0;
    }

    if (*pre) {
      RunConfig cfg = load_config_or_default(pre_config);
      cfg.validate();
      fs::create_directories(pre_out);
      cfg.write_json_file((fs::path(pre_out) / "resolved_config.json")
                              .string());
      const Manifest train_m = load_manifest(pre_train);
      const Manifest dev_m = load_manifest(pre_dev);
      CorpusStore train(train_m, cfg.fbank, cfg.model.sample_rate_hz);
      CorpusStore dev(dev_m, cfg.fbank, cfg.model.sample_rate_hz);
      PretrainLabels labels;
      if (!pre_labels.empty()) {
        FEA_CHECK_T(!pre_kmeans.empty(), ConfigError,
                    "--labels requires --kmeans");
        labels.labels = read_label_file(pre_labels);
        labels.kmeans = load_kmeans(pre_kmeans);
      } else {
        labels = prepare_labels(cfg, train);
      }
      const auto summary = run_pretrain(
          cfg, train, dev, labels,
          (fs::path(pre_out) / "checkpoint_final.bin").string(), cmdline);
      std::cout << "pretrain finished: loss " << summary.first_loss << " -> "
                << summary.final_loss << ", held-out masked accuracy "
                << summary.heldout_masked_accuracy << "\n";
      return 0;
    }

    if (*adapt || *ft) {
      const bool is_adapt = static_cast<bool>(*adapt);
      RunConfig cfg =
          load_config_or_default(is_adapt ? ad_config : ft_config);
      cfg.validate();
      RunMode mode = RunMode::kAdapter;
      if (!is_adapt) {
        if (ft_frontend == "wave") {
          mode = RunMode::kWaveBaseline;
        } else if (ft_frontend == "fbank_noadapter") {
          mode = RunMode::kFbankNoAdapter;
        } else {
          throw ConfigError("unknown --frontend '" + ft_frontend +
                            "' (use wave or fbank_noadapter)");
        }
      }
      const std::string init = is_adapt ? ad_init : ft_init;
      const std::string resume = is_adapt ? ad_resume : ft_resume;
      FEA_CHECK_T(!init.empty() || !resume.empty(), ConfigError,
                  "need --init (pre-trained checkpoint) or --resume");
      const Manifest train_m = load_manifest(is_adapt ? ad_train : ft_train);
      const Manifest dev_m = load_manifest(is_adapt ? ad_dev : ft_dev);
      const auto outputs =
          run_training(mode, cfg, train_m, dev_m, init,
                       is_adapt ? ad_out : ft_out, cmdline, resume);
      std::cout << run_mode_name(mode) << " finished: dev WER "
                << outputs.final_dev_wer_percent << "%, checkpoint "
                << outputs.checkpoint_path << ", metrics "
                << outputs.metrics_path << "\n";
      return 0;
    }

    if (*ev) {
      RunConfig cfg = load_config_or_default(ev_config);
      cfg.validate();
      LoadedCheckpoint ckpt = load_checkpoint(ev_ckpt);
      check_model_config_compatible(ckpt.meta.model_config, cfg.model);
      const RunMode mode = mode_for_eval(ckpt.meta.train.phase, ev_frontend);
      const Manifest manifest = load_manifest(ev_manifest);
      CorpusStore store(manifest, cfg.fbank, cfg.model.sample_rate_hz);
      const EvalOutcome outcome = evaluate_wer(*ckpt.model, store, mode);
      if (!ev_out.empty()) write_wer_report(ev_out, outcome);
      std::cout << wer_summary_line(outcome.counts) << "\n";
      return 0;
    }

    if (*plot) {
      fs::create_directories(plot_out);
      std::vector<PlotSeries> dist_series, wer_series, l2_series;
      for (const auto& csv : plot_csvs) {
        const auto rows = read_metrics_csv(csv);
        std::string label = fs::path(csv).parent_path().filename().string();
        if (label.empty()) label = csv;
        PlotSeries dist{label, {}}, wer_s{label, {}}, l2{label, {}};
        for (const auto& r : rows) {
          dist.points.emplace_back(static_cast<double>(r.step),
                                   r.frontend_l2);
          l2.points.emplace_back(static_cast<double>(r.step), r.l_l2);
          if (r.dev_wer.has_value())
            wer_s.points.emplace_back(static_cast<double>(r.step), *r.dev_wer);
        }
        dist_series.push_back(std::move(dist));
        wer_series.push_back(std::move(wer_s));
        l2_series.push_back(std::move(l2));
      }
      write_svg_line_chart((fs::path(plot_out) / "frontend_l2.svg").string(),
                           "Front-end Euclidean distance", "update",
                           "distance", dist_series);
      write_svg_line_chart((fs::path(plot_out) / "l2_loss.svg").string(),
                           "L2 distillation loss", "update", "loss",
                           l2_series);
      write_svg_line_chart((fs::path(plot_out) / "dev_wer.svg").string(),
                           "Dev WER", "update", "WER (%)", wer_series);
      std::cout << "wrote plots under " << plot_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
