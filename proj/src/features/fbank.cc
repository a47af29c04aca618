// features/fbank.cc

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

#include "fea/features/fbank.h"

#include <cmath>

#include "fea/core/error.h"
#include "fea/core/rng.h"

namespace fea {

namespace {

constexpr double kPi = 3.14159265358979323846;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// In-place iterative radix-2 FFT. fft_size must be a power of two.
void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  const size_t n = re.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (size_t i = 0; i < n; i += len) {
      double cur_r = 1.0, cur_i = 0.0;
      for (size_t j = 0; j < len / 2; ++j) {
        const double ur = re[i + j], ui = im[i + j];
        const double vr =
            re[i + j + len / 2] * cur_r - im[i + j + len / 2] * cur_i;
        const double vi =
            re[i + j + len / 2] * cur_i + im[i + j + len / 2] * cur_r;
        re[i + j] = ur + vr;
        im[i + j] = ui + vi;
        re[i + j + len / 2] = ur - vr;
        im[i + j + len / 2] = ui - vi;
        const double nr = cur_r * wr - cur_i * wi;
        cur_i = cur_r * wi + cur_i * wr;
        cur_r = nr;
      }
    }
  }
}

std::vector<double> mel_edge_points(int n_mels, int sample_rate_hz) {
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(sample_rate_hz / 2.0);
  std::vector<double> pts(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    pts[i] = mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1);
  return pts;
}

}  // namespace

void validate_clip(const WaveformClip& clip) {
  FEA_CHECK_T(!clip.samples.empty(), DataError,
              "clip '" << clip.id << "': no samples");
  FEA_CHECK_T(clip.sample_rate_hz > 0, DataError,
              "clip '" << clip.id << "': sample rate must be positive");
  for (double s : clip.samples)
    FEA_CHECK_T(std::isfinite(s), DataError,
                "clip '" << clip.id << "': non-finite amplitude");
}

void validate_features(const FeatureMatrix& feat) {
  FEA_CHECK_T(feat.frames() >= 1 && feat.dim() >= 1, DataError,
              "feature matrix must be at least 1x1");
  FEA_CHECK_T(feat.stride_ms > 0.0, DataError, "stride_ms must be positive");
  FEA_CHECK_T(feat.data.all_finite(), DataError,
              "feature matrix has non-finite entries");
}

std::string feature_kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::kFbank: return "fbank";
    case FeatureKind::kMfcc: return "mfcc";
    case FeatureKind::kFrontendOutput: return "frontend_output";
  }
  return "?";
}

void FbankConfig::validate(int sample_rate_hz) const {
  FEA_CHECK_T(n_mels >= 1, ConfigError, "n_mels must be >= 1");
  FEA_CHECK_T(log_floor > 0.0, ConfigError, "log_floor must be positive");
  FEA_CHECK_T(dither >= 0.0, ConfigError, "dither must be non-negative");
  FEA_CHECK_T(hop_ms > 0.0 && hop_ms <= win_ms, ConfigError,
              "hop_ms must be in (0, win_ms]");
  const int win = win_samples(sample_rate_hz);
  FEA_CHECK_T(fft_size >= win, ConfigError,
              "fft_size " << fft_size << " smaller than window (" << win
                          << " samples)");
  FEA_CHECK_T((fft_size & (fft_size - 1)) == 0, ConfigError,
              "fft_size must be a power of two");
}

int fbank_num_frames(int n_samples, int win_samples, int hop_samples) {
  if (n_samples < win_samples) return 0;
  return 1 + (n_samples - win_samples) / hop_samples;
}

Mat mel_filterbank(int n_mels, int fft_size, int sample_rate_hz) {
  const int n_bins = fft_size / 2 + 1;
  const auto pts = mel_edge_points(n_mels, sample_rate_hz);
  Mat fb(n_mels, n_bins);
  const double bin_hz = static_cast<double>(sample_rate_hz) / fft_size;
  for (int m = 0; m < n_mels; ++m) {
    const double left = pts[m], center = pts[m + 1], right = pts[m + 2];
    for (int b = 0; b < n_bins; ++b) {
      const double mel = hz_to_mel(b * bin_hz);
      double wgt = 0.0;
      if (mel > left && mel < right) {
        wgt = (mel <= center) ? (mel - left) / (center - left)
                              : (right - mel) / (right - center);
      }
      fb(m, b) = wgt;
    }
  }
  return fb;
}

std::pair<double, double> mel_bin_range_hz(int bin, int n_mels,
                                           int sample_rate_hz) {
  const auto pts = mel_edge_points(n_mels, sample_rate_hz);
  FEA_CHECK(bin >= 0 && bin < n_mels, "mel bin out of range");
  return {mel_to_hz(pts[bin]), mel_to_hz(pts[bin + 2])};
}

FeatureMatrix compute_fbank(const WaveformClip& clip, const FbankConfig& cfg,
                            uint64_t dither_seed) {
  validate_clip(clip);
  cfg.validate(clip.sample_rate_hz);
  const int win = cfg.win_samples(clip.sample_rate_hz);
  const int hop = cfg.hop_samples(clip.sample_rate_hz);
  const int n = static_cast<int>(clip.samples.size());
  FEA_CHECK_T(n >= win, DataError,
              "clip '" << clip.id << "' too short for one window: " << n
                       << " samples < " << win);
  const int t = fbank_num_frames(n, win, hop);
  const int n_bins = cfg.fft_size / 2 + 1;
  const Mat fb = mel_filterbank(cfg.n_mels, cfg.fft_size, clip.sample_rate_hz);

  std::vector<double> window(win);
  for (int i = 0; i < win; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / (win - 1));

  Rng rng(dither_seed);
  FeatureMatrix out;
  out.kind = FeatureKind::kFbank;
  out.stride_ms = cfg.hop_ms;
  out.data.resize(t, cfg.n_mels);

  std::vector<double> re(cfg.fft_size), im(cfg.fft_size);
  std::vector<double> frame(win), power(n_bins);
  for (int fr = 0; fr < t; ++fr) {
    const int start = fr * hop;
    for (int i = 0; i < win; ++i) {
      double s = clip.samples[start + i];
      if (cfg.dither > 0.0) s += cfg.dither * rng.next_gaussian();
      frame[i] = s;
    }
    // pre-emphasis then window
    for (int i = win - 1; i > 0; --i)
      frame[i] -= cfg.preemphasis * frame[i - 1];
    frame[0] -= cfg.preemphasis * frame[0];
    for (int i = 0; i < win; ++i) frame[i] *= window[i];

    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    std::copy(frame.begin(), frame.end(), re.begin());
    fft_radix2(re, im);
    for (int b = 0; b < n_bins; ++b) power[b] = re[b] * re[b] + im[b] * im[b];

    double* orow = out.data.row(fr);
    for (int m = 0; m < cfg.n_mels; ++m) {
      const double* frow = fb.row(m);
      double e = 0.0;
      for (int b = 0; b < n_bins; ++b) e += frow[b] * power[b];
      orow[m] = std::log(std::max(e, cfg.log_floor));
    }
  }
  return out;
}

FeatureMatrix compute_mfcc(const WaveformClip& clip, const FbankConfig& cfg,
                           int n_ceps, uint64_t dither_seed) {
  FEA_CHECK_T(n_ceps >= 1 && n_ceps <= cfg.n_mels, ConfigError,
              "n_ceps must be in [1, n_mels]");
  FeatureMatrix logmel = compute_fbank(clip, cfg, dither_seed);
  const int t = logmel.frames();
  const int d = cfg.n_mels;

  // orthonormal DCT-II matrix, truncated to n_ceps rows
  Mat dct(n_ceps, d);
  for (int k = 0; k < n_ceps; ++k) {
    const double s =
        (k == 0) ? std::sqrt(1.0 / d) : std::sqrt(2.0 / d);
    for (int j = 0; j < d; ++j)
      dct(k, j) = s * std::cos(kPi * (2.0 * j + 1.0) * k / (2.0 * d));
  }

  FeatureMatrix out;
  out.kind = FeatureKind::kMfcc;
  out.stride_ms = cfg.hop_ms;
  out.data.resize(t, n_ceps);
  for (int fr = 0; fr < t; ++fr) {
    const double* lrow = logmel.data.row(fr);
    double* orow = out.data.row(fr);
    for (int k = 0; k < n_ceps; ++k) {
      const double* drow = dct.row(k);
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += drow[j] * lrow[j];
      orow[k] = s;
    }
  }
  return out;
}

FeatureMatrix add_deltas(const FeatureMatrix& feat) {
  const int t = feat.frames(), d = feat.dim();
  // standard +-2 regression window, denom = 2 * (1^2 + 2^2)
  const double denom = 10.0;
  auto clamp_row = [&](int r) { return std::min(std::max(r, 0), t - 1); };

  Mat delta(t, d), delta2(t, d);
  for (int r = 0; r < t; ++r)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int w = 1; w <= 2; ++w)
        s += w * (feat.data(clamp_row(r + w), j) - feat.data(clamp_row(r - w), j));
      delta(r, j) = s / denom;
    }
  for (int r = 0; r < t; ++r)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int w = 1; w <= 2; ++w)
        s += w * (delta(clamp_row(r + w), j) - delta(clamp_row(r - w), j));
      delta2(r, j) = s / denom;
    }

  FeatureMatrix out;
  out.kind = feat.kind;
  out.stride_ms = feat.stride_ms;
  out.data.resize(t, 3 * d);
  for (int r = 0; r < t; ++r) {
    double* orow = out.data.row(r);
    for (int j = 0; j < d; ++j) {
      orow[j] = feat.data(r, j);
      orow[d + j] = delta(r, j);
      orow[2 * d + j] = delta2(r, j);
    }
  }
  return out;
}

}  // namespace fea
