// train/metrics.h

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

#ifndef FEA_TRAIN_METRICS_H_
#define FEA_TRAIN_METRICS_H_

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fea/losses/losses.h"

namespace fea {

// One row per optimizer update. dev_wer (percent) is present only on
// evaluation updates. frontend_l2 is the probe-batch Euclidean distance
// between the two front-ends.
struct MetricsRow {
  long long step = 0;
  Regime regime = Regime::kFinetune;
  double l_ctc = 0.0;
  double l_l2 = 0.0;
  double frontend_l2 = 0.0;
  std::optional<double> dev_wer;
  double wall_s = 0.0;
};

extern const char kMetricsHeader[];

// Append-only CSV writer; enforces a monotonically increasing step index.
class MetricsWriter {
 public:
  // truncates unless append=true (append expects an existing header)
  MetricsWriter(const std::string& path, bool append = false);
  void write(const MetricsRow& row);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream os_;
  long long last_step_ = 0;
};

std::vector<MetricsRow> read_metrics_csv(const std::string& path);

// Row equality ignoring wall-clock time (wall_s is diagnostic, not part of
// the reproducibility contract).
bool rows_equal_ignoring_wall(const MetricsRow& a, const MetricsRow& b);

}  // namespace fea

#endif  // FEA_TRAIN_METRICS_H_
