// pretrain/kmeans.cc

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

#include "fea/pretrain/kmeans.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fea/core/error.h"
#include "fea/core/rng.h"

namespace fea {

namespace {

double sq_dist(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double c = a[i] - b[i];
    s += c * c;
  }
  return s;
}

int nearest_centroid(const Mat& centroids, const double* x) {
  int best = 0;
  double best_d = sq_dist(centroids.row(0), x, centroids.cols());
  for (int c = 1; c < centroids.rows(); ++c) {
    const double d = sq_dist(centroids.row(c), x, centroids.cols());
    if (d < best_d) {  // strict: ties keep the lowest id
      best_d = d;
      best = c;
    }
  }
  return best;
}

KMeansModel lloyd_iterate(KMeansModel model, const Mat& pool, int max_iter) {
  const int k = model.k(), d = model.dim(), n = pool.rows();
  std::vector<int> assign(n);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      assign[i] = nearest_centroid(model.centroids, pool.row(i));
      inertia += sq_dist(model.centroids.row(assign[i]), pool.row(i), d);
    }
    FEA_CHECK(inertia <= prev_inertia + 1e-9 * (1.0 + prev_inertia),
              "kmeans_fit: inertia increased (" << prev_inertia << " -> "
                                                << inertia << ")");
    if (inertia == prev_inertia) break;
    prev_inertia = inertia;

    Mat sums(k, d);
    std::vector<long long> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      double* srow = sums.row(assign[i]);
      const double* prow = pool.row(i);
      for (int j = 0; j < d; ++j) srow[j] += prow[j];
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      double* crow = model.centroids.row(c);
      const double* srow = sums.row(c);
      for (int j = 0; j < d; ++j) crow[j] = srow[j] / counts[c];
    }
  }
  return model;
}

}  // namespace

KMeansModel kmeans_fit(const std::vector<FeatureMatrix>& features, int k,
                       int max_iter, uint64_t seed,
                       const Mat* initial_centroids) {
  FEA_CHECK_T(k >= 2, ConfigError, "kmeans_fit: k must be >= 2");
  FEA_CHECK_T(max_iter >= 1, ConfigError, "kmeans_fit: max_iter must be >= 1");
  FEA_CHECK_T(!features.empty(), DataError, "kmeans_fit: no features");
  const int d = features[0].dim();
  long long total = 0;
  for (const auto& f : features) {
    FEA_CHECK_T(f.dim() == d, DataError, "kmeans_fit: mixed feature dims");
    total += f.frames();
  }
  FEA_CHECK_T(total >= k, DataError, "kmeans_fit: " << total
                                                    << " frames < k=" << k);

  // pool all frames
  Mat pool(static_cast<int>(total), d);
  int row = 0;
  for (const auto& f : features)
    for (int r = 0; r < f.frames(); ++r) {
      std::copy(f.data.row(r), f.data.row(r) + d, pool.row(row));
      ++row;
    }

  Rng rng(seed);
  KMeansModel model;
  const int n = pool.rows();
  if (initial_centroids != nullptr) {
    FEA_CHECK_T(initial_centroids->rows() == k &&
                    initial_centroids->cols() == d,
                ConfigError, "kmeans_fit: initial centroids must be KxD");
    model.centroids = *initial_centroids;
    return lloyd_iterate(model, pool, max_iter);
  }
  // k-means++ seeding
  model.centroids.resize(k, d);
  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  int first = static_cast<int>(rng.next_below(n));
  std::copy(pool.row(first), pool.row(first) + d, model.centroids.row(0));
  for (int c = 1; c < k; ++c) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dd = sq_dist(model.centroids.row(c - 1), pool.row(i), d);
      if (dd < min_d[i]) min_d[i] = dd;
      sum += min_d[i];
    }
    int pick = n - 1;
    if (sum > 0.0) {
      const double target = rng.next_double() * sum;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += min_d[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.next_below(n));
    }
    std::copy(pool.row(pick), pool.row(pick) + d, model.centroids.row(c));
  }

  return lloyd_iterate(std::move(model), pool, max_iter);
}

std::vector<int> assign_labels(const KMeansModel& model,
                               const FeatureMatrix& feat) {
  FEA_CHECK_T(feat.dim() == model.dim(), DataError,
              "assign_labels: feature dim " << feat.dim()
                                            << " != centroid dim "
                                            << model.dim());
  std::vector<int> out(feat.frames());
  for (int r = 0; r < feat.frames(); ++r)
    out[r] = nearest_centroid(model.centroids, feat.data.row(r));
  return out;
}

std::vector<int> resample_labels(const std::vector<int>& labels,
                                 double label_stride_ms,
                                 double target_stride_ms, int target_len) {
  FEA_CHECK(label_stride_ms > 0.0 && target_stride_ms > 0.0,
            "resample_labels: strides must be positive");
  const double ratio = target_stride_ms / label_stride_ms;
  const int factor = static_cast<int>(ratio + 0.5);
  FEA_CHECK(factor >= 1 && std::fabs(ratio - factor) < 1e-9,
            "resample_labels: target stride " << target_stride_ms
                                              << " ms is not an integer "
                                                 "multiple of label stride "
                                              << label_stride_ms << " ms");
  std::vector<int> out;
  for (size_t i = 0; i < labels.size(); i += factor) out.push_back(labels[i]);
  if (target_len >= 0 && static_cast<int>(out.size()) > target_len)
    out.resize(target_len);
  return out;
}

void write_label_file(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<int>>>& labels) {
  std::ofstream os(path);
  FEA_CHECK_T(os.good(), DataError, "cannot open '" << path << "' for write");
  for (const auto& [id, ids] : labels) {
    os << id << '\t';
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i) os << ' ';
      os << ids[i];
    }
    os << '\n';
  }
  FEA_CHECK_T(os.good(), DataError, "failed writing '" << path << "'");
}

void save_kmeans(const std::string& path, const KMeansModel& model) {
  std::ofstream os(path, std::ios::binary);
  FEA_CHECK_T(os.good(), DataError, "cannot open '" << path << "' for write");
  const uint32_t k = static_cast<uint32_t>(model.k());
  const uint32_t d = static_cast<uint32_t>(model.dim());
  os.write(reinterpret_cast<const char*>(&k), sizeof(k));
  os.write(reinterpret_cast<const char*>(&d), sizeof(d));
  os.write(reinterpret_cast<const char*>(model.centroids.data()),
           static_cast<std::streamsize>(model.centroids.size() *
                                        sizeof(double)));
  FEA_CHECK_T(os.good(), DataError, "failed writing '" << path << "'");
}

KMeansModel load_kmeans(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  FEA_CHECK_T(is.good(), DataError, "cannot open k-means file '" << path
                                                                 << "'");
  uint32_t k = 0, d = 0;
  is.read(reinterpret_cast<char*>(&k), sizeof(k));
  is.read(reinterpret_cast<char*>(&d), sizeof(d));
  FEA_CHECK_T(is.good() && k >= 2 && d >= 1, DataError,
              "'" << path << "': malformed k-means header");
  KMeansModel model;
  model.centroids.resize(static_cast<int>(k), static_cast<int>(d));
  is.read(reinterpret_cast<char*>(model.centroids.data()),
          static_cast<std::streamsize>(model.centroids.size() *
                                       sizeof(double)));
  FEA_CHECK_T(is.good(), DataError, "'" << path << "': truncated centroids");
  return model;
}

std::vector<std::pair<std::string, std::vector<int>>> read_label_file(
    const std::string& path) {
  std::ifstream is(path);
  FEA_CHECK_T(is.good(), DataError, "cannot open label file '" << path << "'");
  std::vector<std::pair<std::string, std::vector<int>>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    FEA_CHECK_T(tab != std::string::npos, DataError,
                path << ":" << line_no << ": missing tab separator");
    std::vector<int> ids;
    std::istringstream iss(line.substr(tab + 1));
    int v;
    while (iss >> v) ids.push_back(v);
    out.emplace_back(line.substr(0, tab), std::move(ids));
  }
  return out;
}

}  // namespace fea
