// features/feature_io.cc

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

#include "fea/features/feature_io.h"

#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "fea/core/error.h"

namespace fea {

namespace {

template <typename T>
void write_le(std::ostream& os, T v) {
  // this library targets little-endian hosts only
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  FEA_CHECK_T(is.good(), DataError, "feature record truncated");
  return v;
}

}  // namespace

void write_feature_record(std::ostream& os, const std::string& id,
                          const FeatureMatrix& feat) {
  write_le<uint32_t>(os, static_cast<uint32_t>(id.size()));
  os.write(id.data(), static_cast<std::streamsize>(id.size()));
  write_le<uint32_t>(os, static_cast<uint32_t>(feat.frames()));
  write_le<uint32_t>(os, static_cast<uint32_t>(feat.dim()));
  write_le<double>(os, feat.stride_ms);
  for (int r = 0; r < feat.frames(); ++r)
    for (int c = 0; c < feat.dim(); ++c)
      write_le<float>(os, static_cast<float>(feat.data(r, c)));
  FEA_CHECK_T(os.good(), DataError, "failed writing feature record");
}

bool read_feature_record(std::istream& is, std::string* id,
                         FeatureMatrix* feat) {
  uint32_t id_len = 0;
  is.read(reinterpret_cast<char*>(&id_len), sizeof(id_len));
  if (is.eof() && is.gcount() == 0) return false;
  FEA_CHECK_T(is.good(), DataError, "feature record truncated in header");
  std::vector<char> buf(id_len);
  if (id_len > 0) {
    is.read(buf.data(), id_len);
    FEA_CHECK_T(is.good(), DataError, "feature record truncated in id");
  }
  id->assign(buf.begin(), buf.end());
  const uint32_t t = read_le<uint32_t>(is);
  const uint32_t d = read_le<uint32_t>(is);
  feat->stride_ms = read_le<double>(is);
  FEA_CHECK_T(t >= 1 && d >= 1, DataError, "feature record with empty shape");
  feat->data.resize(static_cast<int>(t), static_cast<int>(d));
  for (uint32_t r = 0; r < t; ++r)
    for (uint32_t c = 0; c < d; ++c)
      feat->data(static_cast<int>(r), static_cast<int>(c)) =
          static_cast<double>(read_le<float>(is));
  return true;
}

}  // namespace fea
