// data/synth.cc

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

#include "fea/data/synth.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fea/core/error.h"
#include "fea/core/rng.h"
#include "fea/data/manifest.h"
#include "fea/data/wav_io.h"

namespace fea {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Letter-specific tone pair, well under the 8 kHz nyquist.
void letter_frequencies(int letter_index, double* f1, double* f2) {
  *f1 = 350.0 + 130.0 * letter_index;
  *f2 = 2200.0 + 170.0 * letter_index;
}

void append_letter(std::vector<double>& samples, int letter_index,
                   double duration_s, double amp, int rate, Rng& rng) {
  double f1, f2;
  letter_frequencies(letter_index, &f1, &f2);
  // random phases per occurrence, like natural excitation: identity lives
  // in the spectral envelope, not in waveform shape
  const double phase1 = kTwoPi * rng.next_double();
  const double phase2 = kTwoPi * rng.next_double();
  const int n = static_cast<int>(duration_s * rate);
  const int ramp = rate / 100;  // 10 ms attack/decay against clicks
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    double env = 1.0;
    if (i < ramp) env = static_cast<double>(i) / ramp;
    if (n - 1 - i < ramp) env = std::min(env, static_cast<double>(n - 1 - i) / ramp);
    samples.push_back(amp * env *
                      (0.35 * std::sin(kTwoPi * f1 * t + phase1) +
                       0.25 * std::sin(kTwoPi * f2 * t + phase2)));
  }
}

void append_silence(std::vector<double>& samples, double duration_s, int rate) {
  samples.insert(samples.end(), static_cast<size_t>(duration_s * rate), 0.0);
}

}  // namespace

std::vector<double> synth_utterance(const SynthSpec& spec, uint64_t utt_seed,
                                    std::string* text) {
  FEA_CHECK_T(spec.n_letters >= 2 && spec.n_letters <= 26, ConfigError,
              "synth: n_letters must be in [2, 26]");
  Rng rng(utt_seed);
  const int n_words =
      spec.min_words +
      static_cast<int>(rng.next_below(spec.max_words - spec.min_words + 1));
  std::vector<double> samples;
  std::string transcript;
  append_silence(samples, spec.edge_s, spec.sample_rate_hz);
  for (int w = 0; w < n_words; ++w) {
    if (w > 0) {
      append_silence(samples, spec.gap_s, spec.sample_rate_hz);
      transcript += ' ';
    }
    const int len = spec.min_word_len +
                    static_cast<int>(rng.next_below(
                        spec.max_word_len - spec.min_word_len + 1));
    for (int i = 0; i < len; ++i) {
      const int letter = static_cast<int>(rng.next_below(spec.n_letters));
      const double jitter =
          1.0 + spec.letter_jitter * (2.0 * rng.next_double() - 1.0);
      const double amp = 0.7 + 0.3 * rng.next_double();
      append_letter(samples, letter, spec.letter_s * jitter, amp,
                    spec.sample_rate_hz, rng);
      transcript += static_cast<char>('a' + letter);
    }
  }
  append_silence(samples, spec.edge_s, spec.sample_rate_hz);
  if (spec.noise_level > 0.0)
    for (double& s : samples) s += spec.noise_level * rng.next_gaussian();
  if (text) *text = transcript;
  return samples;
}

void synth_corpus(const SynthSpec& spec, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "wav");

  const struct {
    const char* split;
    int count;
    uint64_t salt;
  } splits[] = {{"train", spec.n_train, 101},
                {"dev", spec.n_dev, 202},
                {"test", spec.n_test, 303}};

  for (const auto& s : splits) {
    Manifest manifest;
    for (int i = 0; i < s.count; ++i) {
      char id[64];
      std::snprintf(id, sizeof(id), "%s_%04d", s.split, i);
      std::string text;
      const auto samples =
          synth_utterance(spec, hash_seed(spec.seed, s.salt, i), &text);
      const std::string rel = std::string("wav/") + id + ".wav";
      write_wav((fs::path(out_dir) / rel).string(), samples,
                spec.sample_rate_hz);
      ManifestRecord rec;
      rec.utt_id = id;
      rec.audio_path = rel;
      rec.duration_s =
          static_cast<double>(samples.size()) / spec.sample_rate_hz;
      rec.text = text;
      manifest.records.push_back(std::move(rec));
    }
    write_manifest((fs::path(out_dir) / (std::string(s.split) + ".jsonl"))
                       .string(),
                   manifest);
  }
}

}  // namespace fea
