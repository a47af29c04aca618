// data/wav_io.cc

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

#include "fea/data/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "fea/core/error.h"

namespace fea {

namespace {

template <typename T>
T read_le(std::istream& is, const std::string& path, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  FEA_CHECK_T(is.good(), DataError,
              "'" << path << "': truncated while reading " << what);
  return v;
}

template <typename T>
void write_le(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

std::vector<int16_t> read_audio_pcm16(const std::string& path,
                                      int required_rate_hz) {
  std::ifstream is(path, std::ios::binary);
  FEA_CHECK_T(is.good(), DataError, "cannot open audio file '" << path << "'");

  char tag[4];
  is.read(tag, 4);
  FEA_CHECK_T(is.good() && std::memcmp(tag, "RIFF", 4) == 0, DataError,
              "'" << path << "': not a RIFF file");
  read_le<uint32_t>(is, path, "riff size");
  is.read(tag, 4);
  FEA_CHECK_T(is.good() && std::memcmp(tag, "WAVE", 4) == 0, DataError,
              "'" << path << "': not a WAVE file");

  bool fmt_seen = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  std::vector<int16_t> samples;
  bool data_seen = false;
  while (is.read(tag, 4)) {
    const uint32_t chunk_size = read_le<uint32_t>(is, path, "chunk size");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      FEA_CHECK_T(chunk_size >= 16, DataError,
                  "'" << path << "': malformed fmt chunk");
      format = read_le<uint16_t>(is, path, "format");
      channels = read_le<uint16_t>(is, path, "channels");
      rate = read_le<uint32_t>(is, path, "sample rate");
      read_le<uint32_t>(is, path, "byte rate");
      read_le<uint16_t>(is, path, "block align");
      bits = read_le<uint16_t>(is, path, "bits per sample");
      is.ignore(chunk_size - 16);
      fmt_seen = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      FEA_CHECK_T(fmt_seen, DataError,
                  "'" << path << "': data chunk before fmt chunk");
      FEA_CHECK_T(chunk_size % 2 == 0, DataError,
                  "'" << path << "': odd data chunk size");
      samples.resize(chunk_size / 2);
      is.read(reinterpret_cast<char*>(samples.data()), chunk_size);
      FEA_CHECK_T(is.good(), DataError, "'" << path << "': truncated data");
      data_seen = true;
      break;
    } else {
      is.ignore(chunk_size + (chunk_size & 1));
    }
  }
  FEA_CHECK_T(fmt_seen && data_seen, DataError,
              "'" << path << "': missing fmt or data chunk");
  FEA_CHECK_T(format == 1, DataError,
              "'" << path << "': only PCM encoding accepted (format tag "
                  << format << ")");
  FEA_CHECK_T(channels == 1, DataError,
              "'" << path << "': expected mono, got " << channels
                  << " channels");
  FEA_CHECK_T(bits == 16, DataError,
              "'" << path << "': expected 16-bit samples, got " << bits);
  FEA_CHECK_T(static_cast<int>(rate) == required_rate_hz, DataError,
              "'" << path << "': expected " << required_rate_hz << " Hz, got "
                  << rate << " (no resampling is performed)");
  FEA_CHECK_T(!samples.empty(), DataError, "'" << path << "': empty audio");
  return samples;
}

WaveformClip clip_from_pcm16(const std::vector<int16_t>& pcm, int rate_hz,
                             const std::string& id) {
  WaveformClip clip;
  clip.sample_rate_hz = rate_hz;
  clip.id = id;
  clip.samples.resize(pcm.size());
  for (size_t i = 0; i < pcm.size(); ++i)
    clip.samples[i] = static_cast<double>(pcm[i]) / 32768.0;
  return clip;
}

WaveformClip read_audio(const std::string& path, int required_rate_hz) {
  const auto pcm = read_audio_pcm16(path, required_rate_hz);
  return clip_from_pcm16(pcm, required_rate_hz,
                         std::filesystem::path(path).stem().string());
}

void write_wav(const std::string& path, const std::vector<double>& samples,
               int sample_rate_hz) {
  std::ofstream os(path, std::ios::binary);
  FEA_CHECK_T(os.good(), DataError, "cannot open '" << path << "' for write");
  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
  os.write("RIFF", 4);
  write_le<uint32_t>(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  write_le<uint32_t>(os, 16);
  write_le<uint16_t>(os, 1);  // PCM
  write_le<uint16_t>(os, 1);  // mono
  write_le<uint32_t>(os, static_cast<uint32_t>(sample_rate_hz));
  write_le<uint32_t>(os, static_cast<uint32_t>(sample_rate_hz * 2));
  write_le<uint16_t>(os, 2);
  write_le<uint16_t>(os, 16);
  os.write("data", 4);
  write_le<uint32_t>(os, data_bytes);
  for (double s : samples) {
    const double clamped = std::min(0.999969482421875, std::max(-1.0, s));
    write_le<int16_t>(os, static_cast<int16_t>(std::lrint(clamped * 32768.0)));
  }
  FEA_CHECK_T(os.good(), DataError, "failed writing '" << path << "'");
}

}  // namespace fea
