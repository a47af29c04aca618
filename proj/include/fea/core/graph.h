// core/graph.h

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

#ifndef FEA_CORE_GRAPH_H_
#define FEA_CORE_GRAPH_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fea/core/mat.h"

namespace fea {

// Named trainable tensor. Owned by a model, referenced by graph leaves.
// grad accumulates across backward calls until zero_grad().
struct Param {
  std::string name;
  Mat value;
  Mat grad;

  Param() = default;
  Param(std::string n, Mat v)
      : name(std::move(n)), value(std::move(v)),
        grad(value.rows(), value.cols()) {}

  void zero_grad() { grad.fill(0.0); }
};

namespace ad {

// Reverse-mode autodiff over Mat values. Graphs are built per step
// (define-by-run) and discarded after backward. Children own their parents
// through shared_ptr, so dropping the root frees the whole tape.
struct Node;
using NodeRef = std::shared_ptr<Node>;

struct Node {
  Mat val;
  Mat grad;  // sized lazily by backward()
  bool requires_grad = false;
  std::vector<NodeRef> parents;
  // Reads this node's grad and accumulates into parents / params.
  std::function<void(Node&)> backward_fn;
};

NodeRef make_node(Mat val, std::vector<NodeRef> parents,
                  std::function<void(Node&)> backward_fn);

// Leaf wrapping a constant (no gradient ever flows).
NodeRef constant(Mat val);

// Leaf referencing a Param; backward accumulates into p->grad.
// The Param must outlive the graph.
NodeRef leaf(Param* p);

// Detached copy: value passes through, gradient stops here.
NodeRef stop_grad(const NodeRef& x);

// Runs backward from a 1x1 scalar root. Accumulates into Param::grad
// for every param leaf reachable from root.
void backward(const NodeRef& root);

// ---- elementwise / structural ----
NodeRef add(const NodeRef& a, const NodeRef& b);
NodeRef sub(const NodeRef& a, const NodeRef& b);
NodeRef scale(const NodeRef& a, double s);
NodeRef mul_mask(const NodeRef& a, Mat mask);  // elementwise by constant
NodeRef gelu(const NodeRef& x);
NodeRef relu(const NodeRef& x);

NodeRef slice_rows(const NodeRef& x, int start, int len);
NodeRef take_rows_strided(const NodeRef& x, int factor);
NodeRef col_slice(const NodeRef& x, int start, int len);
NodeRef col_concat(const std::vector<NodeRef>& parts);

// Replaces rows listed in `rows` by the (learned) embedding m [1 x D].
NodeRef replace_rows(const NodeRef& x, const std::vector<int>& rows,
                     const NodeRef& m);

// ---- linear algebra ----
NodeRef matmul(const NodeRef& a, const NodeRef& b);
NodeRef matmul_nt(const NodeRef& a, const NodeRef& b);  // a * b^T
// y = x * W + b, with W [din x dout] and b [1 x dout] broadcast per row.
NodeRef linear(const NodeRef& x, const NodeRef& w, const NodeRef& b);

// ---- normalization / activations over rows ----
NodeRef layer_norm(const NodeRef& x, const NodeRef& gamma, const NodeRef& beta,
                   double eps = 1e-5);
NodeRef softmax_rows(const NodeRef& x);
NodeRef log_softmax_rows(const NodeRef& x);

// ---- convolutions ----
// 1-D conv over time. x: [T x Cin], w: [Cout x (Cin*k)], b: [1 x Cout].
// No padding; T_out = floor((T - k)/stride) + 1.
NodeRef conv1d(const NodeRef& x, const NodeRef& w, const NodeRef& b, int k,
               int stride);

// 2-D conv over a (time x freq) grid with Cin channels packed per row:
// x: [T x (Cin*F)], layout channel-major (index c*F + f).
// w: [Cout x (Cin*kt*kf)], b: [1 x Cout].
// Time axis unpadded, freq axis zero-padded by pad_f on both sides.
// T_out = floor((T - kt)/st) + 1, F_out = floor((F + 2*pad_f - kf)/sf) + 1.
NodeRef conv2d(const NodeRef& x, const NodeRef& w, const NodeRef& b, int c_in,
               int f_in, int kt, int kf, int st, int sf, int pad_f);

// ---- reductions ----
NodeRef sum_all(const NodeRef& x);
NodeRef mean_all(const NodeRef& x);
// mean over all elements of (a - b)^2
NodeRef mse_all(const NodeRef& a, const NodeRef& b);
// mean over `rows` of -logp(row, ids[row]); `rows` must be non-empty
NodeRef gather_nll_mean(const NodeRef& logp, const std::vector<int>& ids,
                        const std::vector<int>& rows);

inline double scalar_of(const NodeRef& n) { return n->val(0, 0); }

}  // namespace ad
}  // namespace fea

#endif  // FEA_CORE_GRAPH_H_
