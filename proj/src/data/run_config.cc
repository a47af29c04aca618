// data/run_config.cc

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

#include "fea/data/run_config.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fea/core/error.h"

namespace fea {

using nlohmann::json;

namespace {

json wave_frontend_to_json(const WaveFrontEndConfig& c) {
  json layers = json::array();
  for (const auto& l : c.conv_layers)
    layers.push_back({{"channels", l.channels},
                      {"kernel", l.kernel},
                      {"stride", l.stride}});
  return {{"conv_layers", layers}, {"output_dim", c.output_dim}};
}

WaveFrontEndConfig wave_frontend_from_json(const json& j) {
  WaveFrontEndConfig c;
  c.conv_layers.clear();
  for (const auto& l : j.at("conv_layers"))
    c.conv_layers.push_back({l.at("channels").get<int>(),
                             l.at("kernel").get<int>(),
                             l.at("stride").get<int>()});
  c.output_dim = j.at("output_dim").get<int>();
  return c;
}

json model_to_json(const ModelConfig& c) {
  return {{"sample_rate_hz", c.sample_rate_hz},
          {"wave_frontend", wave_frontend_to_json(c.wave_frontend)},
          {"fbank_frontend",
           {{"subsample_factor", c.fbank_frontend.subsample_factor},
            {"n_mels", c.fbank_frontend.n_mels},
            {"hidden_channels", c.fbank_frontend.hidden_channels},
            {"output_dim", c.fbank_frontend.output_dim}}},
          {"encoder",
           {{"n_layers", c.encoder.n_layers},
            {"d_model", c.encoder.d_model},
            {"n_heads", c.encoder.n_heads},
            {"d_ff", c.encoder.d_ff},
            {"dropout", c.encoder.dropout},
            {"max_frames", c.encoder.max_frames}}},
          {"vocab_size", c.vocab_size},
          {"n_clusters", c.n_clusters}};
}

ModelConfig model_from_json(const json& j) {
  ModelConfig c;
  c.sample_rate_hz = j.at("sample_rate_hz").get<int>();
  c.wave_frontend = wave_frontend_from_json(j.at("wave_frontend"));
  const auto& fb = j.at("fbank_frontend");
  c.fbank_frontend.subsample_factor = fb.at("subsample_factor").get<int>();
  c.fbank_frontend.n_mels = fb.at("n_mels").get<int>();
  c.fbank_frontend.hidden_channels = fb.at("hidden_channels").get<int>();
  c.fbank_frontend.output_dim = fb.at("output_dim").get<int>();
  const auto& enc = j.at("encoder");
  c.encoder.n_layers = enc.at("n_layers").get<int>();
  c.encoder.d_model = enc.at("d_model").get<int>();
  c.encoder.n_heads = enc.at("n_heads").get<int>();
  c.encoder.d_ff = enc.at("d_ff").get<int>();
  c.encoder.dropout = enc.at("dropout").get<double>();
  c.encoder.max_frames = enc.at("max_frames").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.n_clusters = j.at("n_clusters").get<int>();
  return c;
}

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  fbank.validate(model.sample_rate_hz);
  specaug.validate();
  FEA_CHECK_T(fbank.n_mels == model.fbank_frontend.n_mels, ConfigError,
              "fbank.n_mels " << fbank.n_mels
                              << " != fbank_frontend.n_mels "
                              << model.fbank_frontend.n_mels);
  FEA_CHECK_T(target_stride_ms == 20 || target_stride_ms == 40, ConfigError,
              "target_stride_ms must be 20 or 40, got " << target_stride_ms);
  const double fbank_out_stride =
      fbank.hop_ms * model.fbank_frontend.subsample_factor;
  FEA_CHECK_T(std::fabs(fbank_out_stride - target_stride_ms) < 1e-9,
              ConfigError,
              "inconsistent stride pairing: hop " << fbank.hop_ms
                  << " ms x subsample_factor "
                  << model.fbank_frontend.subsample_factor << " = "
                  << fbank_out_stride << " ms, but target_stride_ms = "
                  << target_stride_ms);
  const double wave_stride =
      model.wave_frontend.stride_ms(model.sample_rate_hz);
  FEA_CHECK_T(target_stride_ms >= wave_stride &&
                  std::fmod(static_cast<double>(target_stride_ms),
                            wave_stride) < 1e-9,
              ConfigError,
              "target stride " << target_stride_ms
                               << " ms must be a multiple of the waveform "
                                  "front-end stride "
                               << wave_stride << " ms");
  FEA_CHECK_T(n_w >= 0, ConfigError, "n_w must be >= 0");
  FEA_CHECK_T(n_w_unit == "updates" || n_w_unit == "epochs", ConfigError,
              "n_w_unit must be 'updates' or 'epochs'");
  FEA_CHECK_T(l2_weight >= 0.0, ConfigError, "l2_weight must be >= 0");
  FEA_CHECK_T(total_updates >= 0, ConfigError, "total_updates must be >= 0");
  FEA_CHECK_T(batch_size >= 1, ConfigError, "batch_size must be >= 1");
  FEA_CHECK_T(eval_interval >= 1, ConfigError, "eval_interval must be >= 1");
  FEA_CHECK_T(save_interval >= 0, ConfigError, "save_interval must be >= 0");
  FEA_CHECK_T(probe_utts >= 1, ConfigError, "probe_utts must be >= 1");
  FEA_CHECK_T(mask_prob >= 0.0 && mask_prob <= 1.0, ConfigError,
              "mask_prob must be in [0, 1]");
  FEA_CHECK_T(wave_ft_mask_prob >= 0.0 && wave_ft_mask_prob <= 1.0,
              ConfigError, "wave_ft_mask_prob must be in [0, 1]");
  FEA_CHECK_T(mask_span >= 1 && wave_ft_mask_span >= 1, ConfigError,
              "mask spans must be >= 1");
  FEA_CHECK_T(n_ceps >= 1 && n_ceps <= fbank.n_mels, ConfigError,
              "n_ceps must be in [1, n_mels]");
  FEA_CHECK_T(kmeans_iters >= 1, ConfigError, "kmeans_iters must be >= 1");
  FEA_CHECK_T(pretrain_updates >= 0, ConfigError,
              "pretrain_updates must be >= 0");
}

std::string RunConfig::to_json_string() const {
  json j;
  j["model"] = model_to_json(model);
  j["fbank"] = {{"n_mels", fbank.n_mels},       {"win_ms", fbank.win_ms},
                {"hop_ms", fbank.hop_ms},       {"fft_size", fbank.fft_size},
                {"log_floor", fbank.log_floor}, {"dither", fbank.dither},
                {"preemphasis", fbank.preemphasis}};
  j["specaug"] = {{"n_time_masks", specaug.n_time_masks},
                  {"max_time_mask_frames", specaug.max_time_mask_frames},
                  {"n_freq_masks", specaug.n_freq_masks},
                  {"max_freq_mask_bins", specaug.max_freq_mask_bins},
                  {"replace_value", specaug.replace_value},
                  {"enabled", specaug_enabled},
                  {"in_warmup", specaug_in_warmup}};
  j["wave_ft_mask"] = {{"prob", wave_ft_mask_prob},
                       {"span", wave_ft_mask_span}};
  j["adapter"] = {{"n_w", n_w},
                  {"n_w_unit", n_w_unit},
                  {"target_stride_ms", target_stride_ms},
                  {"l2_weight", l2_weight},
                  {"reset_fbank_optimizer_at_boundary",
                   reset_fbank_optimizer_at_boundary}};
  j["train"] = {{"total_updates", total_updates},
                {"batch_size", batch_size},
                {"seed", seed},
                {"eval_interval", eval_interval},
                {"save_interval", save_interval},
                {"probe_utts", probe_utts}};
  j["lr"] = {{"peak", lr.peak},
             {"warmup_frac", lr.warmup_frac},
             {"hold_frac", lr.hold_frac},
             {"init_scale", lr.init_scale},
             {"final_scale", lr.final_scale}};
  j["optimizer"] = {{"beta1", optimizer.beta1},
                    {"beta2", optimizer.beta2},
                    {"eps", optimizer.eps},
                    {"weight_decay", optimizer.weight_decay},
                    {"clip_norm", optimizer.clip_norm}};
  j["pretrain"] = {{"updates", pretrain_updates},
                   {"lr_peak", pretrain_lr.peak},
                   {"lr_warmup_frac", pretrain_lr.warmup_frac},
                   {"mask_prob", mask_prob},
                   {"mask_span", mask_span},
                   {"n_ceps", n_ceps},
                   {"kmeans_iters", kmeans_iters}};
  return j.dump(2);
}

RunConfig RunConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    if (j.contains("model")) c.model = model_from_json(j.at("model"));
    if (j.contains("fbank")) {
      const auto& f = j.at("fbank");
      maybe_get(f, "n_mels", c.fbank.n_mels);
      maybe_get(f, "win_ms", c.fbank.win_ms);
      maybe_get(f, "hop_ms", c.fbank.hop_ms);
      maybe_get(f, "fft_size", c.fbank.fft_size);
      maybe_get(f, "log_floor", c.fbank.log_floor);
      maybe_get(f, "dither", c.fbank.dither);
      maybe_get(f, "preemphasis", c.fbank.preemphasis);
    }
    if (j.contains("specaug")) {
      const auto& s = j.at("specaug");
      maybe_get(s, "n_time_masks", c.specaug.n_time_masks);
      maybe_get(s, "max_time_mask_frames", c.specaug.max_time_mask_frames);
      maybe_get(s, "n_freq_masks", c.specaug.n_freq_masks);
      maybe_get(s, "max_freq_mask_bins", c.specaug.max_freq_mask_bins);
      maybe_get(s, "replace_value", c.specaug.replace_value);
      maybe_get(s, "enabled", c.specaug_enabled);
      maybe_get(s, "in_warmup", c.specaug_in_warmup);
    }
    if (j.contains("wave_ft_mask")) {
      maybe_get(j.at("wave_ft_mask"), "prob", c.wave_ft_mask_prob);
      maybe_get(j.at("wave_ft_mask"), "span", c.wave_ft_mask_span);
    }
    if (j.contains("adapter")) {
      const auto& a = j.at("adapter");
      maybe_get(a, "n_w", c.n_w);
      maybe_get(a, "n_w_unit", c.n_w_unit);
      maybe_get(a, "target_stride_ms", c.target_stride_ms);
      maybe_get(a, "l2_weight", c.l2_weight);
      maybe_get(a, "reset_fbank_optimizer_at_boundary",
                c.reset_fbank_optimizer_at_boundary);
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      maybe_get(t, "total_updates", c.total_updates);
      maybe_get(t, "batch_size", c.batch_size);
      maybe_get(t, "seed", c.seed);
      maybe_get(t, "eval_interval", c.eval_interval);
      maybe_get(t, "save_interval", c.save_interval);
      maybe_get(t, "probe_utts", c.probe_utts);
    }
    if (j.contains("lr")) {
      const auto& l = j.at("lr");
      maybe_get(l, "peak", c.lr.peak);
      maybe_get(l, "warmup_frac", c.lr.warmup_frac);
      maybe_get(l, "hold_frac", c.lr.hold_frac);
      maybe_get(l, "init_scale", c.lr.init_scale);
      maybe_get(l, "final_scale", c.lr.final_scale);
    }
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      maybe_get(o, "beta1", c.optimizer.beta1);
      maybe_get(o, "beta2", c.optimizer.beta2);
      maybe_get(o, "eps", c.optimizer.eps);
      maybe_get(o, "weight_decay", c.optimizer.weight_decay);
      maybe_get(o, "clip_norm", c.optimizer.clip_norm);
    }
    if (j.contains("pretrain")) {
      const auto& p = j.at("pretrain");
      maybe_get(p, "updates", c.pretrain_updates);
      maybe_get(p, "lr_peak", c.pretrain_lr.peak);
      maybe_get(p, "lr_warmup_frac", c.pretrain_lr.warmup_frac);
      maybe_get(p, "mask_prob", c.mask_prob);
      maybe_get(p, "mask_span", c.mask_span);
      maybe_get(p, "n_ceps", c.n_ceps);
      maybe_get(p, "kmeans_iters", c.kmeans_iters);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream is(path);
  FEA_CHECK_T(is.good(), ConfigError, "cannot open config '" << path << "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json_string(ss.str());
}

void RunConfig::write_json_file(const std::string& path) const {
  std::ofstream os(path);
  FEA_CHECK_T(os.good(), ConfigError,
              "cannot open '" << path << "' for write");
  os << to_json_string() << '\n';
}

uint64_t RunConfig::hash() const {
  const std::string s = to_json_string();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void check_model_config_compatible(const ModelConfig& expected,
                                   const ModelConfig& actual) {
  auto fail = [](const char* field, auto a, auto b) {
    detail::MsgStream ms;
    ms << "model config mismatch on field '" << field << "': checkpoint has "
       << a << ", run config has " << b;
    throw ConfigError(ms.str());
  };
  if (expected.sample_rate_hz != actual.sample_rate_hz)
    fail("sample_rate_hz", expected.sample_rate_hz, actual.sample_rate_hz);
  if (expected.encoder.d_model != actual.encoder.d_model)
    fail("encoder.d_model", expected.encoder.d_model, actual.encoder.d_model);
  if (expected.encoder.n_layers != actual.encoder.n_layers)
    fail("encoder.n_layers", expected.encoder.n_layers,
         actual.encoder.n_layers);
  if (expected.encoder.n_heads != actual.encoder.n_heads)
    fail("encoder.n_heads", expected.encoder.n_heads, actual.encoder.n_heads);
  if (expected.encoder.d_ff != actual.encoder.d_ff)
    fail("encoder.d_ff", expected.encoder.d_ff, actual.encoder.d_ff);
  if (expected.vocab_size != actual.vocab_size)
    fail("vocab_size", expected.vocab_size, actual.vocab_size);
  if (expected.n_clusters != actual.n_clusters)
    fail("n_clusters", expected.n_clusters, actual.n_clusters);
  // fbank_frontend geometry is intentionally not compared here: adaptation
  // re-initializes that block, so it is free to differ from the parent.
  if (expected.wave_frontend.conv_layers.size() !=
      actual.wave_frontend.conv_layers.size())
    fail("wave_frontend.conv_layers", expected.wave_frontend.conv_layers.size(),
         actual.wave_frontend.conv_layers.size());
  for (size_t i = 0; i < expected.wave_frontend.conv_layers.size(); ++i) {
    const auto& e = expected.wave_frontend.conv_layers[i];
    const auto& a = actual.wave_frontend.conv_layers[i];
    if (e.channels != a.channels || e.kernel != a.kernel ||
        e.stride != a.stride)
      fail("wave_frontend.conv_layers", i, i);
  }
}

}  // namespace fea
