// core/mat.cc

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

#include "fea/core/mat.h"

#include <cmath>
#include <cstring>

#include "fea/core/error.h"

namespace fea {

void Mat::axpy(double alpha, const Mat& o) {
  FEA_CHECK(same_shape(o), "Mat::axpy: shape mismatch");
  const double* src = o.data();
  double* dst = data();
  const size_t n = size();
  for (size_t i = 0; i < n; ++i) dst[i] += alpha * src[i];
}

bool Mat::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double Mat::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

uint64_t Mat::byte_hash() const {
  uint64_t h = 1469598103934665603ull;
  const unsigned char* p =
      reinterpret_cast<const unsigned char*>(data_.data());
  const size_t n = data_.size() * sizeof(double);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  // fold in the shape so that reshapes of identical bytes differ
  h ^= static_cast<uint64_t>(rows_) * 0x9e3779b97f4a7c15ull;
  h ^= static_cast<uint64_t>(cols_);
  return h;
}

Mat matmul(const Mat& a, const Mat& b) {
  FEA_CHECK(a.cols() == b.rows(), "matmul: inner dims mismatch");
  Mat c(a.rows(), b.cols());
  const int m = a.rows(), k = a.cols(), n = b.cols();
  for (int i = 0; i < m; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b.row(p);
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
  FEA_CHECK(a.cols() == b.cols(), "matmul_nt: inner dims mismatch");
  Mat c(a.rows(), b.rows());
  const int m = a.rows(), k = a.cols(), n = b.rows();
  for (int i = 0; i < m; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (int j = 0; j < n; ++j) {
      const double* brow = b.row(j);
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += arow[p] * brow[p];
      crow[j] = s;
    }
  }
  return c;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
  FEA_CHECK(a.rows() == b.rows(), "matmul_tn: inner dims mismatch");
  Mat c(a.cols(), b.cols());
  const int m = a.cols(), k = a.rows(), n = b.cols();
  for (int p = 0; p < k; ++p) {
    const double* arow = a.row(p);
    const double* brow = b.row(p);
    for (int i = 0; i < m; ++i) {
      const double av = arow[i];
      if (av == 0.0) continue;
      double* crow = c.row(i);
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

}  // namespace fea
