// data/wav_io.h

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

#ifndef FEA_DATA_WAV_IO_H_
#define FEA_DATA_WAV_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fea/features/feature_types.h"

namespace fea {

// Accepts exactly one format: 16-bit PCM mono RIFF/WAVE at required_rate_hz.
// Anything else (stereo, other rates, non-PCM encodings) is an error; no
// silent resampling. Samples are scaled by 1/32768 into [-1, 1).
WaveformClip read_audio(const std::string& path, int required_rate_hz = 16000);

// Raw int16 payload of the same file (lossless in-memory storage).
std::vector<int16_t> read_audio_pcm16(const std::string& path,
                                      int required_rate_hz = 16000);

WaveformClip clip_from_pcm16(const std::vector<int16_t>& pcm, int rate_hz,
                             const std::string& id);

// Writes 16-bit PCM mono; samples are clamped to [-1, 1) and quantized.
void write_wav(const std::string& path, const std::vector<double>& samples,
               int sample_rate_hz);

}  // namespace fea

#endif  // FEA_DATA_WAV_IO_H_
