// features/feature_io.h

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

#ifndef FEA_FEATURES_FEATURE_IO_H_
#define FEA_FEATURES_FEATURE_IO_H_

#include <iosfwd>
#include <string>

#include "fea/features/feature_types.h"

namespace fea {

// Per-utterance binary feature record:
//   u32 id_len | id bytes | u32 T | u32 D | f64 stride_ms | T*D f32 row-major
// All fields little-endian. Values are narrowed to float on write.
void write_feature_record(std::ostream& os, const std::string& id,
                          const FeatureMatrix& feat);

// Reads one record. Returns false on clean EOF; throws on a truncated or
// malformed record.
bool read_feature_record(std::istream& is, std::string* id,
                         FeatureMatrix* feat);

}  // namespace fea

#endif  // FEA_FEATURES_FEATURE_IO_H_
