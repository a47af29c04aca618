// pretrain/kmeans.h

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

#ifndef FEA_PRETRAIN_KMEANS_H_
#define FEA_PRETRAIN_KMEANS_H_

#include <string>
#include <vector>

#include "fea/features/feature_types.h"

namespace fea {

struct KMeansModel {
  Mat centroids;  // K x D

  int k() const { return centroids.rows(); }
  int dim() const { return centroids.cols(); }
};

// Lloyd's algorithm with k-means++ seeding. Deterministic per seed; inertia
// is checked to be non-increasing every iteration. Throws when the pooled
// frame count is below k. Passing initial_centroids (K x D) skips the
// k-means++ seeding and starts Lloyd from there.
KMeansModel kmeans_fit(const std::vector<FeatureMatrix>& features, int k,
                       int max_iter, uint64_t seed,
                       const Mat* initial_centroids = nullptr);

// Nearest centroid per frame (Euclidean); ties break toward the lowest id.
std::vector<int> assign_labels(const KMeansModel& model,
                               const FeatureMatrix& feat);

// Stride reconciliation: keeps every factor-th label where factor =
// target_stride_ms / label_stride_ms (must divide exactly), then truncates
// to target_len (pass -1 to keep everything).
std::vector<int> resample_labels(const std::vector<int>& labels,
                                 double label_stride_ms,
                                 double target_stride_ms, int target_len);

// Pseudo-label files: one line per utterance, "utt_id<TAB>id id id ...".
void write_label_file(const std::string& path,
                      const std::vector<std::pair<std::string,
                                                  std::vector<int>>>& labels);
std::vector<std::pair<std::string, std::vector<int>>> read_label_file(
    const std::string& path);

// Standalone centroid file for the prepare-labels -> pretrain handoff; the
// model also travels inside the pre-training checkpoint container.
void save_kmeans(const std::string& path, const KMeansModel& model);
KMeansModel load_kmeans(const std::string& path);

}  // namespace fea

#endif  // FEA_PRETRAIN_KMEANS_H_
