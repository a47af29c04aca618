// features/fbank.h

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

#ifndef FEA_FEATURES_FBANK_H_
#define FEA_FEATURES_FBANK_H_

#include <vector>

#include "fea/features/feature_types.h"

namespace fea {

// Log-Mel filterbank features. Hamming window, pre-emphasis, power spectrum
// via radix-2 FFT, triangular Mel filters over [0, nyquist], natural log with
// a floor. No edge padding: frames the clip as
//   T = 1 + floor((N - win)/hop),
// dropping the tail shorter than one window.
// Throws if the clip is shorter than one window.
FeatureMatrix compute_fbank(const WaveformClip& clip, const FbankConfig& cfg,
                            uint64_t dither_seed = 0);

// MFCC: orthonormal DCT-II of each log-Mel frame, truncated to n_ceps.
FeatureMatrix compute_mfcc(const WaveformClip& clip, const FbankConfig& cfg,
                           int n_ceps, uint64_t dither_seed = 0);

// Appends delta and delta-delta columns (window +-2 regression), tripling D.
FeatureMatrix add_deltas(const FeatureMatrix& feat);

// Number of frames produced for a clip of n_samples (or 0 if too short).
int fbank_num_frames(int n_samples, int win_samples, int hop_samples);

// Mel filterbank used by compute_fbank: n_mels rows over n_fft/2+1 bins.
// Exposed for the bin-frequency checks in tests.
Mat mel_filterbank(int n_mels, int fft_size, int sample_rate_hz);

// (left, right) edge frequencies in Hz of a triangular Mel filter.
std::pair<double, double> mel_bin_range_hz(int bin, int n_mels,
                                           int sample_rate_hz);

}  // namespace fea

#endif  // FEA_FEATURES_FBANK_H_
