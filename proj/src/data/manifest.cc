// data/manifest.cc

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

#include "fea/data/manifest.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "fea/core/error.h"
#include "fea/losses/vocab.h"

namespace fea {

Manifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  FEA_CHECK_T(is.good(), DataError, "cannot open manifest '" << path << "'");
  const std::filesystem::path base =
      std::filesystem::path(path).parent_path();

  Manifest manifest;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": malformed JSON line: " + e.what());
    }
    FEA_CHECK_T(j.contains("utt_id") && j.contains("audio") &&
                    j.contains("duration_s") && j.contains("text"),
                DataError,
                path << ":" << line_no
                     << ": record needs keys utt_id, audio, duration_s, text");
    ManifestRecord rec;
    rec.utt_id = j.at("utt_id").get<std::string>();
    rec.audio_path = j.at("audio").get<std::string>();
    rec.duration_s = j.at("duration_s").get<double>();
    FEA_CHECK_T(seen_ids.insert(rec.utt_id).second, DataError,
                path << ":" << line_no << ": duplicate utt_id '" << rec.utt_id
                     << "'");
    // relative audio paths resolve against the manifest location
    std::filesystem::path audio(rec.audio_path);
    if (audio.is_relative()) audio = base / audio;
    rec.audio_path = audio.string();
    FEA_CHECK_T(std::filesystem::exists(audio), DataError,
                path << ":" << line_no << ": audio file '" << rec.audio_path
                     << "' is unreadable");
    int stripped = 0;
    rec.text = letter_vocab().normalize(j.at("text").get<std::string>(),
                                        &stripped);
    manifest.stripped_chars += stripped;
    manifest.records.push_back(std::move(rec));
  }
  std::cerr << "loaded manifest '" << path << "': " << manifest.records.size()
            << " utterances, " << manifest.stripped_chars
            << " out-of-vocabulary characters stripped\n";
  return manifest;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  std::ofstream os(path);
  FEA_CHECK_T(os.good(), DataError, "cannot open '" << path << "' for write");
  for (const auto& rec : manifest.records) {
    nlohmann::json j;
    j["utt_id"] = rec.utt_id;
    j["audio"] = rec.audio_path;
    j["duration_s"] = rec.duration_s;
    j["text"] = rec.text;
    os << j.dump() << '\n';
  }
  FEA_CHECK_T(os.good(), DataError, "failed writing '" << path << "'");
}

}  // namespace fea
