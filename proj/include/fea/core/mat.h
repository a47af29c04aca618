// core/mat.h

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

#ifndef FEA_CORE_MAT_H_
#define FEA_CORE_MAT_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fea {

// Dense row-major matrix of doubles. All model math runs at 64-bit so that
// finite-difference gradient checks and bitwise reproducibility contracts
// hold without precision games.
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
  const double* row(int r) const {
    return data_.data() + static_cast<size_t>(r) * cols_;
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  void resize(int rows, int cols, double fill = 0.0) {
    rows_ = rows;
    cols_ = cols;
    data_.assign(static_cast<size_t>(rows) * cols, fill);
  }

  bool same_shape(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  // this += alpha * o (shapes must match)
  void axpy(double alpha, const Mat& o);

  bool all_finite() const;
  double sum() const;

  // 64-bit FNV-1a over the raw bytes; used for bitwise-identity checks
  // on parameter groups and checkpoint round trips.
  uint64_t byte_hash() const;

 private:
  int rows_, cols_;
  std::vector<double> data_;
};

// c = a * b
Mat matmul(const Mat& a, const Mat& b);
// c = a * b^T
Mat matmul_nt(const Mat& a, const Mat& b);
// c = a^T * b
Mat matmul_tn(const Mat& a, const Mat& b);

Mat transpose(const Mat& a);

}  // namespace fea

#endif  // FEA_CORE_MAT_H_
