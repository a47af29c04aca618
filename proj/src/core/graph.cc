// core/graph.cc

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

#include "fea/core/graph.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "fea/core/error.h"

namespace fea {
namespace ad {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

bool any_requires_grad(const std::vector<NodeRef>& parents) {
  for (const auto& p : parents) {
    if (p->requires_grad) return true;
  }
  return false;
}

void ensure_grad(Node& n) {
  if (n.grad.rows() != n.val.rows() || n.grad.cols() != n.val.cols()) {
    n.grad.resize(n.val.rows(), n.val.cols());
  }
}

}  // namespace

NodeRef make_node(Mat val, std::vector<NodeRef> parents,
                  std::function<void(Node&)> backward_fn) {
  auto n = std::make_shared<Node>();
  n->val = std::move(val);
  n->parents = std::move(parents);
  n->requires_grad = any_requires_grad(n->parents);
  if (n->requires_grad) n->backward_fn = std::move(backward_fn);
  return n;
}

NodeRef constant(Mat val) {
  auto n = std::make_shared<Node>();
  n->val = std::move(val);
  return n;
}

NodeRef leaf(Param* p) {
  auto n = std::make_shared<Node>();
  n->val = p->value;
  n->requires_grad = true;
  n->backward_fn = [p](Node& self) { p->grad.axpy(1.0, self.grad); };
  return n;
}

NodeRef stop_grad(const NodeRef& x) { return constant(x->val); }

void backward(const NodeRef& root) {
  FEA_CHECK(root->val.rows() == 1 && root->val.cols() == 1,
            "backward: root must be a 1x1 scalar");
  if (!root->requires_grad) return;

  // Topological order via iterative DFS over requires_grad nodes.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root.get(), 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Node* par = node->parents[idx].get();
      ++idx;
      if (par->requires_grad && !visited.count(par)) {
        visited.insert(par);
        stack.emplace_back(par, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  // order is parents-before-children; propagate in reverse.
  for (Node* n : order) {
    ensure_grad(*n);
    n->grad.fill(0.0);
  }
  root->grad(0, 0) = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn) n->backward_fn(*n);
  }
}

// ---- elementwise / structural ----

NodeRef add(const NodeRef& a, const NodeRef& b) {
  FEA_CHECK(a->val.same_shape(b->val), "add: shape mismatch");
  Mat out = a->val;
  out.axpy(1.0, b->val);
  Node* ap = a.get();
  Node* bp = b.get();
  return make_node(std::move(out), {a, b}, [ap, bp](Node& self) {
    if (ap->requires_grad) {
      ensure_grad(*ap);
      ap->grad.axpy(1.0, self.grad);
    }
    if (bp->requires_grad) {
      ensure_grad(*bp);
      bp->grad.axpy(1.0, self.grad);
    }
  });
}

NodeRef sub(const NodeRef& a, const NodeRef& b) {
  FEA_CHECK(a->val.same_shape(b->val), "sub: shape mismatch");
  Mat out = a->val;
  out.axpy(-1.0, b->val);
  Node* ap = a.get();
  Node* bp = b.get();
  return make_node(std::move(out), {a, b}, [ap, bp](Node& self) {
    if (ap->requires_grad) {
      ensure_grad(*ap);
      ap->grad.axpy(1.0, self.grad);
    }
    if (bp->requires_grad) {
      ensure_grad(*bp);
      bp->grad.axpy(-1.0, self.grad);
    }
  });
}

NodeRef scale(const NodeRef& a, double s) {
  Mat out = a->val;
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] *= s;
  Node* ap = a.get();
  return make_node(std::move(out), {a}, [ap, s](Node& self) {
    ensure_grad(*ap);
    ap->grad.axpy(s, self.grad);
  });
}

NodeRef mul_mask(const NodeRef& a, Mat mask) {
  FEA_CHECK(a->val.same_shape(mask), "mul_mask: shape mismatch");
  Mat out = a->val;
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] *= mask.data()[i];
  Node* ap = a.get();
  auto m = std::make_shared<Mat>(std::move(mask));
  return make_node(std::move(out), {a}, [ap, m](Node& self) {
    ensure_grad(*ap);
    const size_t n = self.grad.size();
    for (size_t i = 0; i < n; ++i)
      ap->grad.data()[i] += self.grad.data()[i] * m->data()[i];
  });
}

NodeRef gelu(const NodeRef& x) {
  Mat out = x->val;
  for (size_t i = 0; i < out.size(); ++i) {
    const double v = out.data()[i];
    out.data()[i] = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
  }
  Node* xp = x.get();
  return make_node(std::move(out), {x}, [xp](Node& self) {
    ensure_grad(*xp);
    const size_t n = self.grad.size();
    for (size_t i = 0; i < n; ++i) {
      const double v = xp->val.data()[i];
      const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
      xp->grad.data()[i] += self.grad.data()[i] * (cdf + v * pdf);
    }
  });
}

NodeRef relu(const NodeRef& x) {
  Mat out = x->val;
  for (size_t i = 0; i < out.size(); ++i)
    if (out.data()[i] < 0.0) out.data()[i] = 0.0;
  Node* xp = x.get();
  return make_node(std::move(out), {x}, [xp](Node& self) {
    ensure_grad(*xp);
    const size_t n = self.grad.size();
    for (size_t i = 0; i < n; ++i)
      if (xp->val.data()[i] > 0.0) xp->grad.data()[i] += self.grad.data()[i];
  });
}

NodeRef slice_rows(const NodeRef& x, int start, int len) {
  FEA_CHECK(start >= 0 && len >= 1 && start + len <= x->val.rows(),
            "slice_rows: range [" << start << "," << start + len
                                  << ") out of bounds for T=" << x->val.rows());
  const int d = x->val.cols();
  Mat out(len, d);
  for (int r = 0; r < len; ++r)
    std::copy(x->val.row(start + r), x->val.row(start + r) + d, out.row(r));
  Node* xp = x.get();
  return make_node(std::move(out), {x}, [xp, start, len, d](Node& self) {
    ensure_grad(*xp);
    for (int r = 0; r < len; ++r) {
      const double* g = self.grad.row(r);
      double* dst = xp->grad.row(start + r);
      for (int j = 0; j < d; ++j) dst[j] += g[j];
    }
  });
}

NodeRef take_rows_strided(const NodeRef& x, int factor) {
  FEA_CHECK(factor >= 1, "take_rows_strided: factor must be >= 1, got "
                             << factor);
  const int t = x->val.rows(), d = x->val.cols();
  const int t_out = (t + factor - 1) / factor;
  Mat out(t_out, d);
  for (int r = 0; r < t_out; ++r)
    std::copy(x->val.row(r * factor), x->val.row(r * factor) + d, out.row(r));
  Node* xp = x.get();
  return make_node(std::move(out), {x}, [xp, factor, t_out, d](Node& self) {
    ensure_grad(*xp);
    for (int r = 0; r < t_out; ++r) {
      const double* g = self.grad.row(r);
      double* dst = xp->grad.row(r * factor);
      for (int j = 0; j < d; ++j) dst[j] += g[j];
    }
  });
}

NodeRef col_slice(const NodeRef& x, int start, int len) {
  FEA_CHECK(start >= 0 && len >= 1 && start + len <= x->val.cols(),
            "col_slice: out of bounds");
  const int t = x->val.rows();
  Mat out(t, len);
  for (int r = 0; r < t; ++r)
    std::copy(x->val.row(r) + start, x->val.row(r) + start + len, out.row(r));
  Node* xp = x.get();
  return make_node(std::move(out), {x}, [xp, start, len, t](Node& self) {
    ensure_grad(*xp);
    for (int r = 0; r < t; ++r) {
      const double* g = self.grad.row(r);
      double* dst = xp->grad.row(r) + start;
      for (int j = 0; j < len; ++j) dst[j] += g[j];
    }
  });
}

NodeRef col_concat(const std::vector<NodeRef>& parts) {
  FEA_CHECK(!parts.empty(), "col_concat: no parts");
  const int t = parts[0]->val.rows();
  int total = 0;
  for (const auto& p : parts) {
    FEA_CHECK(p->val.rows() == t, "col_concat: row mismatch");
    total += p->val.cols();
  }
  Mat out(t, total);
  int off = 0;
  for (const auto& p : parts) {
    const int c = p->val.cols();
    for (int r = 0; r < t; ++r)
      std::copy(p->val.row(r), p->val.row(r) + c, out.row(r) + off);
    off += c;
  }
  std::vector<Node*> raw;
  raw.reserve(parts.size());
  for (const auto& p : parts) raw.push_back(p.get());
  return make_node(std::move(out), parts, [raw, t](Node& self) {
    int off2 = 0;
    for (Node* p : raw) {
      const int c = p->val.cols();
      if (p->requires_grad) {
        ensure_grad(*p);
        for (int r = 0; r < t; ++r) {
          const double* g = self.grad.row(r) + off2;
          double* dst = p->grad.row(r);
          for (int j = 0; j < c; ++j) dst[j] += g[j];
        }
      }
      off2 += c;
    }
  });
}

NodeRef replace_rows(const NodeRef& x, const std::vector<int>& rows,
                     const NodeRef& m) {
  FEA_CHECK(m->val.rows() == 1 && m->val.cols() == x->val.cols(),
            "replace_rows: embedding shape mismatch");
  Mat out = x->val;
  const int d = out.cols();
  for (int r : rows) {
    FEA_CHECK(r >= 0 && r < out.rows(), "replace_rows: row " << r
                                                             << " out of range");
    std::copy(m->val.row(0), m->val.row(0) + d, out.row(r));
  }
  Node* xp = x.get();
  Node* mp = m.get();
  auto idx = std::make_shared<std::vector<int>>(rows);
  return make_node(std::move(out), {x, m}, [xp, mp, idx, d](Node& self) {
    std::vector<char> is_masked(xp->val.rows(), 0);
    for (int r : *idx) is_masked[r] = 1;
    if (xp->requires_grad) {
      ensure_grad(*xp);
      for (int r = 0; r < xp->val.rows(); ++r) {
        if (is_masked[r]) continue;
        const double* g = self.grad.row(r);
        double* dst = xp->grad.row(r);
        for (int j = 0; j < d; ++j) dst[j] += g[j];
      }
    }
    if (mp->requires_grad) {
      ensure_grad(*mp);
      for (int r : *idx) {
        const double* g = self.grad.row(r);
        double* dst = mp->grad.row(0);
        for (int j = 0; j < d; ++j) dst[j] += g[j];
      }
    }
  });
}

// ---- linear algebra ----

NodeRef matmul(const NodeRef& a, const NodeRef& b) {
  Mat out = fea::matmul(a->val, b->val);
  Node* ap = a.get();
  Node* bp = b.get();
  return make_node(std::move(out), {a, b}, [ap, bp](Node& self) {
    if (ap->requires_grad) {
      ensure_grad(*ap);
      Mat da = fea::matmul_nt(self.grad, bp->val);
      ap->grad.axpy(1.0, da);
    }
    if (bp->requires_grad) {
      ensure_grad(*bp);
      Mat db = fea::matmul_tn(ap->val, self.grad);
      bp->grad.axpy(1.0, db);
    }
  });
}

NodeRef matmul_nt(const NodeRef& a, const NodeRef& b) {
  Mat out = fea::matmul_nt(a->val, b->val);
  Node* ap = a.get();
  Node* bp = b.get();
  return make_node(std::move(out), {a, b}, [ap, bp](Node& self) {
    if (ap->requires_grad) {
      ensure_grad(*ap);
      Mat da = fea::matmul(self.grad, bp->val);
      ap->grad.axpy(1.0, da);
    }
    if (bp->requires_grad) {
      ensure_grad(*bp);
      Mat db = fea::matmul_tn(self.grad, ap->val);
      bp->grad.axpy(1.0, db);
    }
  });
}

NodeRef linear(const NodeRef& x, const NodeRef& w, const NodeRef& b) {
  FEA_CHECK(b->val.rows() == 1 && b->val.cols() == w->val.cols(),
            "linear: bias shape mismatch");
  Mat out = fea::matmul(x->val, w->val);
  for (int r = 0; r < out.rows(); ++r) {
    double* orow = out.row(r);
    const double* brow = b->val.row(0);
    for (int j = 0; j < out.cols(); ++j) orow[j] += brow[j];
  }
  Node* xp = x.get();
  Node* wp = w.get();
  Node* bp = b.get();
  return make_node(std::move(out), {x, w, b}, [xp, wp, bp](Node& self) {
    if (xp->requires_grad) {
      ensure_grad(*xp);
      Mat dx = fea::matmul_nt(self.grad, wp->val);
      xp->grad.axpy(1.0, dx);
    }
    if (wp->requires_grad) {
      ensure_grad(*wp);
      Mat dw = fea::matmul_tn(xp->val, self.grad);
      wp->grad.axpy(1.0, dw);
    }
    if (bp->requires_grad) {
      ensure_grad(*bp);
      double* dst = bp->grad.row(0);
      for (int r = 0; r < self.grad.rows(); ++r) {
        const double* g = self.grad.row(r);
        for (int j = 0; j < self.grad.cols(); ++j) dst[j] += g[j];
      }
    }
  });
}

// ---- normalization / activations ----

NodeRef layer_norm(const NodeRef& x, const NodeRef& gamma, const NodeRef& beta,
                   double eps) {
  const int t = x->val.rows(), d = x->val.cols();
  FEA_CHECK(gamma->val.rows() == 1 && gamma->val.cols() == d &&
                beta->val.rows() == 1 && beta->val.cols() == d,
            "layer_norm: affine shape mismatch");
  Mat out(t, d);
  auto xhat = std::make_shared<Mat>(t, d);
  auto inv_std = std::make_shared<std::vector<double>>(t);
  for (int r = 0; r < t; ++r) {
    const double* xr = x->val.row(r);
    double mean = 0.0;
    for (int j = 0; j < d; ++j) mean += xr[j];
    mean /= d;
    double var = 0.0;
    for (int j = 0; j < d; ++j) {
      const double c = xr[j] - mean;
      var += c * c;
    }
    var /= d;
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    double* hr = xhat->row(r);
    double* orow = out.row(r);
    const double* g = gamma->val.row(0);
    const double* be = beta->val.row(0);
    for (int j = 0; j < d; ++j) {
      hr[j] = (xr[j] - mean) * is;
      orow[j] = hr[j] * g[j] + be[j];
    }
  }
  Node* xp = x.get();
  Node* gp = gamma.get();
  Node* bp = beta.get();
  return make_node(
      std::move(out), {x, gamma, beta},
      [xp, gp, bp, xhat, inv_std, t, d](Node& self) {
        if (gp->requires_grad) {
          ensure_grad(*gp);
          double* dst = gp->grad.row(0);
          for (int r = 0; r < t; ++r) {
            const double* g = self.grad.row(r);
            const double* hr = xhat->row(r);
            for (int j = 0; j < d; ++j) dst[j] += g[j] * hr[j];
          }
        }
        if (bp->requires_grad) {
          ensure_grad(*bp);
          double* dst = bp->grad.row(0);
          for (int r = 0; r < t; ++r) {
            const double* g = self.grad.row(r);
            for (int j = 0; j < d; ++j) dst[j] += g[j];
          }
        }
        if (xp->requires_grad) {
          ensure_grad(*xp);
          const double* gam = gp->val.row(0);
          for (int r = 0; r < t; ++r) {
            const double* g = self.grad.row(r);
            const double* hr = xhat->row(r);
            double sum_dy = 0.0, sum_dyh = 0.0;
            std::vector<double> dy(d);
            for (int j = 0; j < d; ++j) {
              dy[j] = g[j] * gam[j];
              sum_dy += dy[j];
              sum_dyh += dy[j] * hr[j];
            }
            const double is = (*inv_std)[r];
            double* dst = xp->grad.row(r);
            for (int j = 0; j < d; ++j) {
              dst[j] += is * (dy[j] - sum_dy / d - hr[j] * sum_dyh / d);
            }
          }
        }
      });
}

NodeRef softmax_rows(const NodeRef& x) {
  const int t = x->val.rows(), d = x->val.cols();
  Mat out(t, d);
  for (int r = 0; r < t; ++r) {
    const double* xr = x->val.row(r);
    double m = xr[0];
    for (int j = 1; j < d; ++j) m = std::max(m, xr[j]);
    double z = 0.0;
    double* orow = out.row(r);
    for (int j = 0; j < d; ++j) {
      orow[j] = std::exp(xr[j] - m);
      z += orow[j];
    }
    const double iz = 1.0 / z;
    for (int j = 0; j < d; ++j) orow[j] *= iz;
  }
  Node* xp = x.get();
  return make_node(std::move(out), {x}, [xp, t, d](Node& self) {
    ensure_grad(*xp);
    for (int r = 0; r < t; ++r) {
      const double* y = self.val.row(r);
      const double* g = self.grad.row(r);
      double dot = 0.0;
      for (int j = 0; j < d; ++j) dot += y[j] * g[j];
      double* dst = xp->grad.row(r);
      for (int j = 0; j < d; ++j) dst[j] += y[j] * (g[j] - dot);
    }
  });
}

NodeRef log_softmax_rows(const NodeRef& x) {
  const int t = x->val.rows(), d = x->val.cols();
  Mat out(t, d);
  for (int r = 0; r < t; ++r) {
    const double* xr = x->val.row(r);
    double m = xr[0];
    for (int j = 1; j < d; ++j) m = std::max(m, xr[j]);
    double z = 0.0;
    for (int j = 0; j < d; ++j) z += std::exp(xr[j] - m);
    const double lse = m + std::log(z);
    double* orow = out.row(r);
    for (int j = 0; j < d; ++j) orow[j] = xr[j] - lse;
  }
  Node* xp = x.get();
  return make_node(std::move(out), {x}, [xp, t, d](Node& self) {
    ensure_grad(*xp);
    for (int r = 0; r < t; ++r) {
      const double* y = self.val.row(r);
      const double* g = self.grad.row(r);
      double gsum = 0.0;
      for (int j = 0; j < d; ++j) gsum += g[j];
      double* dst = xp->grad.row(r);
      for (int j = 0; j < d; ++j) dst[j] += g[j] - std::exp(y[j]) * gsum;
    }
  });
}

// ---- convolutions ----

NodeRef conv1d(const NodeRef& x, const NodeRef& w, const NodeRef& b, int k,
               int stride) {
  const int t = x->val.rows(), c_in = x->val.cols();
  const int c_out = w->val.rows();
  FEA_CHECK(w->val.cols() == c_in * k, "conv1d: kernel shape mismatch");
  FEA_CHECK(b->val.rows() == 1 && b->val.cols() == c_out,
            "conv1d: bias shape mismatch");
  FEA_CHECK(t >= k, "conv1d: input too short (T=" << t << ", kernel=" << k
                                                  << ")");
  const int t_out = (t - k) / stride + 1;
  Mat out(t_out, c_out);
  for (int o = 0; o < t_out; ++o) {
    const int t0 = o * stride;
    double* orow = out.row(o);
    for (int co = 0; co < c_out; ++co) {
      const double* wrow = w->val.row(co);
      double s = b->val(0, co);
      for (int dt = 0; dt < k; ++dt) {
        const double* xr = x->val.row(t0 + dt);
        const double* wr = wrow + dt;  // weight index ci*k + dt
        for (int ci = 0; ci < c_in; ++ci) s += xr[ci] * wr[ci * k];
      }
      orow[co] = s;
    }
  }
  Node* xp = x.get();
  Node* wp = w.get();
  Node* bp = b.get();
  return make_node(
      std::move(out), {x, w, b},
      [xp, wp, bp, k, stride, t_out, c_in, c_out](Node& self) {
        if (bp->requires_grad) {
          ensure_grad(*bp);
          double* dst = bp->grad.row(0);
          for (int o = 0; o < t_out; ++o) {
            const double* g = self.grad.row(o);
            for (int co = 0; co < c_out; ++co) dst[co] += g[co];
          }
        }
        const bool need_x = xp->requires_grad;
        const bool need_w = wp->requires_grad;
        if (need_x) ensure_grad(*xp);
        if (need_w) ensure_grad(*wp);
        if (!need_x && !need_w) return;
        for (int o = 0; o < t_out; ++o) {
          const int t0 = o * stride;
          const double* g = self.grad.row(o);
          for (int co = 0; co < c_out; ++co) {
            const double gv = g[co];
            if (gv == 0.0) continue;
            const double* wrow = wp->val.row(co);
            double* dwrow = need_w ? wp->grad.row(co) : nullptr;
            for (int dt = 0; dt < k; ++dt) {
              const double* xr = xp->val.row(t0 + dt);
              double* dxr = need_x ? xp->grad.row(t0 + dt) : nullptr;
              for (int ci = 0; ci < c_in; ++ci) {
                const int wi = ci * k + dt;
                if (need_x) dxr[ci] += gv * wrow[wi];
                if (need_w) dwrow[wi] += gv * xr[ci];
              }
            }
          }
        }
      });
}

NodeRef conv2d(const NodeRef& x, const NodeRef& w, const NodeRef& b, int c_in,
               int f_in, int kt, int kf, int st, int sf, int pad_f) {
  const int t = x->val.rows();
  FEA_CHECK(x->val.cols() == c_in * f_in, "conv2d: input layout mismatch");
  const int c_out = w->val.rows();
  FEA_CHECK(w->val.cols() == c_in * kt * kf, "conv2d: kernel shape mismatch");
  FEA_CHECK(b->val.rows() == 1 && b->val.cols() == c_out,
            "conv2d: bias shape mismatch");
  FEA_CHECK(t >= kt, "conv2d: too few frames (T=" << t << ", kt=" << kt << ")");
  const int t_out = (t - kt) / st + 1;
  const int f_out = (f_in + 2 * pad_f - kf) / sf + 1;
  FEA_CHECK(f_out >= 1, "conv2d: frequency axis collapsed");
  Mat out(t_out, c_out * f_out);
  for (int o = 0; o < t_out; ++o) {
    const int t0 = o * st;
    double* orow = out.row(o);
    for (int co = 0; co < c_out; ++co) {
      const double* wrow = w->val.row(co);
      for (int fo = 0; fo < f_out; ++fo) {
        const int f0 = fo * sf - pad_f;
        double s = b->val(0, co);
        for (int ci = 0; ci < c_in; ++ci) {
          for (int dt = 0; dt < kt; ++dt) {
            const double* xr = x->val.row(t0 + dt) + ci * f_in;
            const double* wr = wrow + (ci * kt + dt) * kf;
            for (int df = 0; df < kf; ++df) {
              const int f = f0 + df;
              if (f < 0 || f >= f_in) continue;
              s += xr[f] * wr[df];
            }
          }
        }
        orow[co * f_out + fo] = s;
      }
    }
  }
  Node* xp = x.get();
  Node* wp = w.get();
  Node* bp = b.get();
  return make_node(
      std::move(out), {x, w, b},
      [xp, wp, bp, c_in, f_in, kt, kf, st, sf, pad_f, t_out, c_out](
          Node& self) {
        const int f_out = (f_in + 2 * pad_f - kf) / sf + 1;
        if (bp->requires_grad) {
          ensure_grad(*bp);
          double* dst = bp->grad.row(0);
          for (int o = 0; o < t_out; ++o) {
            const double* g = self.grad.row(o);
            for (int co = 0; co < c_out; ++co)
              for (int fo = 0; fo < f_out; ++fo) dst[co] += g[co * f_out + fo];
          }
        }
        const bool need_x = xp->requires_grad;
        const bool need_w = wp->requires_grad;
        if (need_x) ensure_grad(*xp);
        if (need_w) ensure_grad(*wp);
        if (!need_x && !need_w) return;
        for (int o = 0; o < t_out; ++o) {
          const int t0 = o * st;
          const double* g = self.grad.row(o);
          for (int co = 0; co < c_out; ++co) {
            const double* wrow = wp->val.row(co);
            double* dwrow = need_w ? wp->grad.row(co) : nullptr;
            for (int fo = 0; fo < f_out; ++fo) {
              const double gv = g[co * f_out + fo];
              if (gv == 0.0) continue;
              const int f0 = fo * sf - pad_f;
              for (int ci = 0; ci < c_in; ++ci) {
                for (int dt = 0; dt < kt; ++dt) {
                  const double* xr = xp->val.row(t0 + dt) + ci * f_in;
                  double* dxr =
                      need_x ? xp->grad.row(t0 + dt) + ci * f_in : nullptr;
                  const int wbase = (ci * kt + dt) * kf;
                  for (int df = 0; df < kf; ++df) {
                    const int f = f0 + df;
                    if (f < 0 || f >= f_in) continue;
                    if (need_x) dxr[f] += gv * wrow[wbase + df];
                    if (need_w) dwrow[wbase + df] += gv * xr[f];
                  }
                }
              }
            }
          }
        }
      });
}

// ---- reductions ----

NodeRef sum_all(const NodeRef& x) {
  Mat out(1, 1);
  out(0, 0) = x->val.sum();
  Node* xp = x.get();
  return make_node(std::move(out), {x}, [xp](Node& self) {
    ensure_grad(*xp);
    const double g = self.grad(0, 0);
    for (size_t i = 0; i < xp->grad.size(); ++i) xp->grad.data()[i] += g;
  });
}

NodeRef mean_all(const NodeRef& x) {
  const double inv = 1.0 / static_cast<double>(x->val.size());
  Mat out(1, 1);
  out(0, 0) = x->val.sum() * inv;
  Node* xp = x.get();
  return make_node(std::move(out), {x}, [xp, inv](Node& self) {
    ensure_grad(*xp);
    const double g = self.grad(0, 0) * inv;
    for (size_t i = 0; i < xp->grad.size(); ++i) xp->grad.data()[i] += g;
  });
}

NodeRef mse_all(const NodeRef& a, const NodeRef& b) {
  FEA_CHECK(a->val.same_shape(b->val), "mse_all: shape mismatch ("
                                           << a->val.rows() << "x"
                                           << a->val.cols() << " vs "
                                           << b->val.rows() << "x"
                                           << b->val.cols() << ")");
  const size_t n = a->val.size();
  const double inv = 1.0 / static_cast<double>(n);
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = a->val.data()[i] - b->val.data()[i];
    s += d * d;
  }
  Mat out(1, 1);
  out(0, 0) = s * inv;
  Node* ap = a.get();
  Node* bp = b.get();
  return make_node(std::move(out), {a, b}, [ap, bp, n, inv](Node& self) {
    const double g = self.grad(0, 0);
    if (ap->requires_grad) {
      ensure_grad(*ap);
      for (size_t i = 0; i < n; ++i)
        ap->grad.data()[i] +=
            g * 2.0 * inv * (ap->val.data()[i] - bp->val.data()[i]);
    }
    if (bp->requires_grad) {
      ensure_grad(*bp);
      for (size_t i = 0; i < n; ++i)
        bp->grad.data()[i] -=
            g * 2.0 * inv * (ap->val.data()[i] - bp->val.data()[i]);
    }
  });
}

NodeRef gather_nll_mean(const NodeRef& logp, const std::vector<int>& ids,
                        const std::vector<int>& rows) {
  FEA_CHECK(!rows.empty(), "gather_nll_mean: empty row subset");
  FEA_CHECK(static_cast<int>(ids.size()) == logp->val.rows(),
            "gather_nll_mean: ids length must equal T");
  double s = 0.0;
  for (int r : rows) {
    FEA_CHECK(r >= 0 && r < logp->val.rows(), "gather_nll_mean: bad row");
    FEA_CHECK(ids[r] >= 0 && ids[r] < logp->val.cols(),
              "gather_nll_mean: label id out of range");
    s -= logp->val(r, ids[r]);
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  Mat out(1, 1);
  out(0, 0) = s * inv;
  Node* lp = logp.get();
  auto ids_c = std::make_shared<std::vector<int>>(ids);
  auto rows_c = std::make_shared<std::vector<int>>(rows);
  return make_node(std::move(out), {logp}, [lp, ids_c, rows_c, inv](
                                               Node& self) {
    ensure_grad(*lp);
    const double g = self.grad(0, 0) * inv;
    for (int r : *rows_c) lp->grad(r, (*ids_c)[r]) -= g;
  });
}

}  // namespace ad
}  // namespace fea
