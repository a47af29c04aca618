// train/metrics.cc

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

#include "fea/train/metrics.h"

#include <cstdio>
#include <cstring>
#include <sstream>

#include "fea/core/error.h"

namespace fea {

const char kMetricsHeader[] = "step,regime,l_ctc,l_l2,frontend_l2,dev_wer,wall_s";

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

MetricsWriter::MetricsWriter(const std::string& path, bool append)
    : path_(path),
      os_(path, append ? (std::ios::out | std::ios::app)
                       : (std::ios::out | std::ios::trunc)) {
  FEA_CHECK_T(os_.good(), DataError,
              "cannot open metrics file '" << path << "'");
  if (append) {
    const auto existing = read_metrics_csv(path);
    if (!existing.empty()) last_step_ = existing.back().step;
  } else {
    os_ << kMetricsHeader << '\n';
  }
}

void MetricsWriter::write(const MetricsRow& row) {
  FEA_CHECK(row.step > last_step_,
            "metrics step " << row.step << " not after " << last_step_);
  last_step_ = row.step;
  os_ << row.step << ',' << regime_name(row.regime) << ','
      << fmt_double(row.l_ctc) << ',' << fmt_double(row.l_l2) << ','
      << fmt_double(row.frontend_l2) << ',';
  if (row.dev_wer.has_value()) os_ << fmt_double(*row.dev_wer);
  os_ << ',' << fmt_double(row.wall_s) << '\n';
  os_.flush();
  FEA_CHECK_T(os_.good(), DataError, "failed writing metrics row");
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream is(path);
  FEA_CHECK_T(is.good(), DataError,
              "cannot open metrics file '" << path << "'");
  std::string line;
  FEA_CHECK_T(std::getline(is, line) && line == kMetricsHeader, DataError,
              "'" << path << "': missing or unexpected metrics header");
  std::vector<MetricsRow> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    FEA_CHECK_T(cells.size() == 7, DataError,
                path << ":" << line_no << ": expected 7 columns, got "
                     << cells.size());
    MetricsRow row;
    row.step = std::stoll(cells[0]);
    if (cells[1] == "warmup") {
      row.regime = Regime::kWarmup;
    } else if (cells[1] == "finetune") {
      row.regime = Regime::kFinetune;
    } else {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": bad regime '" + cells[1] + "'");
    }
    row.l_ctc = std::stod(cells[2]);
    row.l_l2 = std::stod(cells[3]);
    row.frontend_l2 = std::stod(cells[4]);
    if (!cells[5].empty()) row.dev_wer = std::stod(cells[5]);
    row.wall_s = std::stod(cells[6]);
    rows.push_back(row);
  }
  return rows;
}

bool rows_equal_ignoring_wall(const MetricsRow& a, const MetricsRow& b) {
  return a.step == b.step && a.regime == b.regime && a.l_ctc == b.l_ctc &&
         a.l_l2 == b.l_l2 && a.frontend_l2 == b.frontend_l2 &&
         a.dev_wer.has_value() == b.dev_wer.has_value() &&
         (!a.dev_wer.has_value() || *a.dev_wer == *b.dev_wer);
}

}  // namespace fea
