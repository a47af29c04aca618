// data/manifest.h

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

#ifndef FEA_DATA_MANIFEST_H_
#define FEA_DATA_MANIFEST_H_

#include <string>
#include <vector>

namespace fea {

struct ManifestRecord {
  std::string utt_id;
  std::string audio_path;
  double duration_s = 0.0;
  std::string text;  // normalized into the letter vocabulary
};

struct Manifest {
  std::vector<ManifestRecord> records;
  int stripped_chars = 0;  // characters dropped by normalization, total

  bool empty() const { return records.empty(); }
  size_t size() const { return records.size(); }
};

// JSON-lines manifest: one object per line with keys utt_id, audio,
// duration_s, text. Transcripts are normalized (lowercase, collapsed
// whitespace, out-of-vocabulary characters stripped and counted). Errors on
// duplicate ids, missing audio files, and malformed lines (with the line
// number). A one-line summary goes to stderr.
Manifest load_manifest(const std::string& path);

void write_manifest(const std::string& path, const Manifest& manifest);

}  // namespace fea

#endif  // FEA_DATA_MANIFEST_H_
