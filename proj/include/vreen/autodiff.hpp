// vreen/autodiff.hpp

// Copyright 2026  The vreen authors

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

// Reverse-mode tape over Eigen matrices.  Recurrent and convolution layers
// are fused ops with hand-derived backward passes; everything is verified
// against central finite differences in the test suite.

#ifndef VREEN_AUTODIFF_HPP_
#define VREEN_AUTODIFF_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vreen/common.hpp"
#include "vreen/types.hpp"

namespace vreen::ad {

using vreen::Mat;
using vreen::Vec;

// A named parameter tensor.  Gradients accumulate into `grad`; `frozen`
// excludes the tensor from optimizer updates but not from the tape.
struct Tensor {
  std::string name;
  Mat value;
  Mat grad;
  bool frozen = false;

  Tensor() = default;
  Tensor(std::string n, Mat v)
      : name(std::move(n)), value(std::move(v)),
        grad(Mat::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(); }
  long size() const { return value.size(); }
};

struct Node {
  int id = -1;
  bool valid() const { return id >= 0; }
};

class Graph {
 public:
  explicit Graph(bool recording = true) : recording_(recording) {}

  bool recording() const { return recording_; }

  const Mat& value(Node n) const { return nodes_[n.id].value; }
  double scalar(Node n) const {
    const Mat& v = nodes_[n.id].value;
    require(v.size() == 1, Errc::invalid_input, "node is not a scalar");
    return v(0, 0);
  }

  Node input(Mat v) { return make(std::move(v), false); }

  Node param(Tensor& t) {
    Node n = make(t.value, true);
    if (recording_) {
      Tensor* tp = &t;
      nodes_[n.id].backward = [tp](Graph& g, int id) {
        tp->grad += g.nodes_[id].grad;
      };
    }
    return n;
  }

  // ---- arithmetic ----

  Node add(Node a, Node b) {
    Node n = make(value(a) + value(b), needs(a) || needs(b));
    if (rec(n)) {
      nodes_[n.id].backward = [a, b](Graph& g, int id) {
        g.accum(a, g.nodes_[id].grad);
        g.accum(b, g.nodes_[id].grad);
      };
    }
    return n;
  }

  Node sub(Node a, Node b) {
    Node n = make(value(a) - value(b), needs(a) || needs(b));
    if (rec(n)) {
      nodes_[n.id].backward = [a, b](Graph& g, int id) {
        g.accum(a, g.nodes_[id].grad);
        g.accum(b, -g.nodes_[id].grad);
      };
    }
    return n;
  }

  Node cmul(Node a, Node b) {
    Node n = make(value(a).cwiseProduct(value(b)), needs(a) || needs(b));
    if (rec(n)) {
      nodes_[n.id].backward = [a, b](Graph& g, int id) {
        g.accum(a, g.nodes_[id].grad.cwiseProduct(g.value(b)));
        g.accum(b, g.nodes_[id].grad.cwiseProduct(g.value(a)));
      };
    }
    return n;
  }

  Node scale(Node a, double c) {
    Node n = make(value(a) * c, needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a, c](Graph& g, int id) {
        g.accum(a, g.nodes_[id].grad * c);
      };
    }
    return n;
  }

  Node add_scalar(Node a, double c) {
    Node n = make(value(a).array() + c, needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        g.accum(a, g.nodes_[id].grad);
      };
    }
    return n;
  }

  // Elementwise product with a constant matrix (masks, fixed weights).
  Node cmul_const(Node a, const Mat& m) {
    Node n = make(value(a).cwiseProduct(m), needs(a));
    if (rec(n)) {
      Mat mc = m;
      nodes_[n.id].backward = [a, mc](Graph& g, int id) {
        g.accum(a, g.nodes_[id].grad.cwiseProduct(mc));
      };
    }
    return n;
  }

  Node matmul(Node a, Node b) {
    Node n = make(value(a) * value(b), needs(a) || needs(b));
    if (rec(n)) {
      nodes_[n.id].backward = [a, b](Graph& g, int id) {
        const Mat& go = g.nodes_[id].grad;
        if (g.needs(a)) g.accum(a, go * g.value(b).transpose());
        if (g.needs(b)) g.accum(b, g.value(a).transpose() * go);
      };
    }
    return n;
  }

  // Adds a column-vector bias to every column.
  Node add_col_bias(Node a, Node bias) {
    Node n = make(value(a).colwise() + Vec(value(bias).col(0)),
                  needs(a) || needs(bias));
    if (rec(n)) {
      nodes_[n.id].backward = [a, bias](Graph& g, int id) {
        g.accum(a, g.nodes_[id].grad);
        g.accum(bias, g.nodes_[id].grad.rowwise().sum());
      };
    }
    return n;
  }

  // Broadcasts a column vector across T columns.
  Node broadcast_col(Node v, int cols) {
    Node n = make(value(v).col(0).replicate(1, cols), needs(v));
    if (rec(n)) {
      nodes_[n.id].backward = [v](Graph& g, int id) {
        g.accum(v, g.nodes_[id].grad.rowwise().sum());
      };
    }
    return n;
  }

  // ---- activations ----

  Node tanh_(Node a) {
    Node n = make(value(a).array().tanh(), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        const Mat& y = g.nodes_[id].value;
        g.accum(a, g.nodes_[id].grad.cwiseProduct(
                       (1.0 - y.array().square()).matrix()));
      };
    }
    return n;
  }

  Node sigmoid_(Node a) {
    Node n = make(value(a).unaryExpr([](double x) {
      return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                    : std::exp(x) / (1.0 + std::exp(x));
    }),
                  needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        const Mat& y = g.nodes_[id].value;
        g.accum(a, g.nodes_[id].grad.cwiseProduct(
                       (y.array() * (1.0 - y.array())).matrix()));
      };
    }
    return n;
  }

  Node leaky_relu(Node a, double slope = 0.2) {
    Node n = make(value(a).unaryExpr(
                      [slope](double x) { return x > 0 ? x : slope * x; }),
                  needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a, slope](Graph& g, int id) {
        const Mat& x = g.value(a);
        g.accum(a, g.nodes_[id].grad.cwiseProduct(x.unaryExpr(
                       [slope](double v) { return v > 0 ? 1.0 : slope; })));
      };
    }
    return n;
  }

  Node softplus(Node a) {
    Node n = make(value(a).unaryExpr([](double x) {
      return x > 30 ? x : std::log1p(std::exp(std::min(x, 30.0)));
    }),
                  needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        const Mat& x = g.value(a);
        g.accum(a, g.nodes_[id].grad.cwiseProduct(x.unaryExpr([](double v) {
          return v >= 0 ? 1.0 / (1.0 + std::exp(-v))
                        : std::exp(v) / (1.0 + std::exp(v));
        })));
      };
    }
    return n;
  }

  Node abs_(Node a) {
    Node n = make(value(a).cwiseAbs(), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        const Mat& x = g.value(a);
        g.accum(a, g.nodes_[id].grad.cwiseProduct(x.unaryExpr([](double v) {
          return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
        })));
      };
    }
    return n;
  }

  Node square(Node a) {
    Node n = make(value(a).array().square(), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        g.accum(a, 2.0 * g.nodes_[id].grad.cwiseProduct(g.value(a)));
      };
    }
    return n;
  }

  // ---- structure ----

  Node vcat(Node a, Node b) {
    const Mat& va = value(a);
    const Mat& vb = value(b);
    require(va.cols() == vb.cols(), Errc::invalid_input,
            "vcat column mismatch");
    Mat v(va.rows() + vb.rows(), va.cols());
    v << va, vb;
    Node n = make(std::move(v), needs(a) || needs(b));
    if (rec(n)) {
      const int ra = static_cast<int>(va.rows());
      nodes_[n.id].backward = [a, b, ra](Graph& g, int id) {
        const Mat& go = g.nodes_[id].grad;
        g.accum(a, go.topRows(ra));
        g.accum(b, go.bottomRows(go.rows() - ra));
      };
    }
    return n;
  }

  Node row_slice(Node a, int start, int count) {
    Node n = make(value(a).middleRows(start, count), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a, start, count](Graph& g, int id) {
        Mat full = Mat::Zero(g.value(a).rows(), g.value(a).cols());
        full.middleRows(start, count) = g.nodes_[id].grad;
        g.accum(a, full);
      };
    }
    return n;
  }

  // Row-major reshape; element (i,j) maps to linear index i*cols+j.
  Node reshape_rowmajor(Node a, int rows, int cols) {
    const Mat& x = value(a);
    require(x.size() == static_cast<long>(rows) * cols, Errc::invalid_input,
            "reshape size mismatch");
    const int in_cols = static_cast<int>(x.cols());
    Mat y(rows, cols);
    for (long k = 0; k < x.size(); ++k)
      y(k / cols, k % cols) = x(k / in_cols, k % in_cols);
    Node n = make(std::move(y), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a, cols, in_cols](Graph& g, int id) {
        const Mat& go = g.nodes_[id].grad;
        Mat gx(g.value(a).rows(), g.value(a).cols());
        for (long k = 0; k < gx.size(); ++k)
          gx(k / in_cols, k % in_cols) = go(k / cols, k % cols);
        g.accum(a, gx);
      };
    }
    return n;
  }

  Node transpose(Node a) {
    Node n = make(value(a).transpose(), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        g.accum(a, g.nodes_[id].grad.transpose());
      };
    }
    return n;
  }

  // ---- reductions ----

  Node sum_all(Node a) {
    Mat v(1, 1);
    v(0, 0) = value(a).sum();
    Node n = make(std::move(v), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        g.accum(a, Mat::Constant(g.value(a).rows(), g.value(a).cols(),
                                 g.nodes_[id].grad(0, 0)));
      };
    }
    return n;
  }

  Node mean_all(Node a) {
    const double inv = 1.0 / static_cast<double>(value(a).size());
    return scale(sum_all(a), inv);
  }

  // Row-wise mean: m x n -> m x 1 (temporal pooling).
  Node row_mean(Node a) {
    const int cols = static_cast<int>(value(a).cols());
    Node n = make(value(a).rowwise().mean(), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a, cols](Graph& g, int id) {
        g.accum(a, g.nodes_[id].grad.replicate(1, cols) / cols);
      };
    }
    return n;
  }

  // Row-wise log-sum-exp: m x n -> m x 1.
  Node logsumexp_rows(Node a) {
    const Mat& x = value(a);
    Mat out(x.rows(), 1);
    for (int i = 0; i < x.rows(); ++i) {
      const double mx = x.row(i).maxCoeff();
      out(i, 0) = mx + std::log((x.row(i).array() - mx).exp().sum());
    }
    Node n = make(std::move(out), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        const Mat& x = g.value(a);
        const Mat& lse = g.nodes_[id].value;
        const Mat& go = g.nodes_[id].grad;
        Mat gx(x.rows(), x.cols());
        for (int i = 0; i < x.rows(); ++i)
          gx.row(i) =
              go(i, 0) * (x.row(i).array() - lse(i, 0)).exp().matrix();
        g.accum(a, gx);
      };
    }
    return n;
  }

  // Main diagonal of a square matrix as a column vector.
  Node diagonal(Node a) {
    const Mat& x = value(a);
    require(x.rows() == x.cols(), Errc::invalid_input,
            "diagonal requires a square matrix");
    Node n = make(Mat(x.diagonal()), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        Mat gx = Mat::Zero(g.value(a).rows(), g.value(a).cols());
        gx.diagonal() = g.nodes_[id].grad.col(0);
        g.accum(a, gx);
      };
    }
    return n;
  }

  // Column-wise L2 normalization with a norm floor.
  Node normalize_cols(Node a, double eps = 1e-12) {
    const Mat& x = value(a);
    Mat y(x.rows(), x.cols());
    std::vector<double> norms(x.cols());
    for (int j = 0; j < x.cols(); ++j) {
      norms[j] = std::max(eps, x.col(j).norm());
      y.col(j) = x.col(j) / norms[j];
    }
    Node n = make(std::move(y), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a, norms](Graph& g, int id) {
        const Mat& y = g.nodes_[id].value;
        const Mat& go = g.nodes_[id].grad;
        Mat gx(y.rows(), y.cols());
        for (int j = 0; j < y.cols(); ++j) {
          const double dot = y.col(j).dot(go.col(j));
          gx.col(j) = (go.col(j) - dot * y.col(j)) / norms[j];
        }
        g.accum(a, gx);
      };
    }
    return n;
  }

  // Log-softmax over a column vector (K x 1).
  Node log_softmax_col(Node a) {
    const Mat& x = value(a);
    require(x.cols() == 1, Errc::invalid_input,
            "log_softmax_col expects a column vector");
    const double mx = x.maxCoeff();
    const double lse = mx + std::log((x.array() - mx).exp().sum());
    Node n = make((x.array() - lse).matrix(), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a](Graph& g, int id) {
        const Mat& logp = g.nodes_[id].value;
        const Mat& go = g.nodes_[id].grad;
        const double gsum = go.sum();
        g.accum(a, go - gsum * logp.array().exp().matrix());
      };
    }
    return n;
  }

  Node pick(Node a, int row, int col) {
    Mat v(1, 1);
    v(0, 0) = value(a)(row, col);
    Node n = make(std::move(v), needs(a));
    if (rec(n)) {
      nodes_[n.id].backward = [a, row, col](Graph& g, int id) {
        Mat gx = Mat::Zero(g.value(a).rows(), g.value(a).cols());
        gx(row, col) = g.nodes_[id].grad(0, 0);
        g.accum(a, gx);
      };
    }
    return n;
  }

  // ---- fused layers ----

  // Embedding lookup: table is H x V, output H x T.
  Node embedding(Node table, const std::vector<int>& ids) {
    const Mat& tab = value(table);
    Mat out(tab.rows(), static_cast<long>(ids.size()));
    for (size_t t = 0; t < ids.size(); ++t) {
      require(ids[t] >= 0 && ids[t] < tab.cols(), Errc::invalid_input,
              "phoneme id out of range");
      out.col(t) = tab.col(ids[t]);
    }
    Node n = make(std::move(out), needs(table));
    if (rec(n)) {
      std::vector<int> idc = ids;
      nodes_[n.id].backward = [table, idc](Graph& g, int id) {
        Mat gt = Mat::Zero(g.value(table).rows(), g.value(table).cols());
        const Mat& go = g.nodes_[id].grad;
        for (size_t t = 0; t < idc.size(); ++t)
          gt.col(idc[t]) += go.col(t);
        g.accum(table, gt);
      };
    }
    return n;
  }

  // Unidirectional LSTM over a D x T sequence; returns H x T hidden states
  // in time order.  Gate layout in w/r/b is [input; forget; cell; output],
  // each H rows.  `reverse` runs right to left.  Initial h and c are zero.
  Node lstm(Node x, Node w, Node r, Node b, bool reverse) {
    const Mat& X = value(x);
    const Mat& W = value(w);
    const Mat& R = value(r);
    const Mat& B = value(b);
    const int T = static_cast<int>(X.cols());
    const int H4 = static_cast<int>(W.rows());
    const int H = H4 / 4;
    require(H * 4 == H4 && R.rows() == H4 && R.cols() == H &&
                B.rows() == H4 && W.cols() == X.rows(),
            Errc::invalid_input, "lstm parameter shape mismatch");

    auto state = std::make_shared<LstmState>();
    state->reverse = reverse;
    // Input contributions for all steps at once; step s reads column
    // idx(s) = reverse ? T-1-s : s.
    state->gates = (W * X).colwise() + Vec(B.col(0));
    state->c = Mat::Zero(H, T);
    state->ct = Mat::Zero(H, T);
    state->h = Mat::Zero(H, T);

    Mat out(H, T);
    Vec h_prev = Vec::Zero(H), c_prev = Vec::Zero(H);
    for (int s = 0; s < T; ++s) {
      const int col = reverse ? T - 1 - s : s;
      Vec z = state->gates.col(col) + R * h_prev;
      for (int k = 0; k < H; ++k) {
        z[k] = sigmoid(z[k]);                 // input gate
        z[H + k] = sigmoid(z[H + k]);         // forget gate
        z[2 * H + k] = std::tanh(z[2 * H + k]);  // cell candidate
        z[3 * H + k] = sigmoid(z[3 * H + k]);    // output gate
      }
      Vec c = z.segment(H, H).cwiseProduct(c_prev) +
              z.head(H).cwiseProduct(z.segment(2 * H, H));
      Vec ct = c.array().tanh();
      Vec h = z.tail(H).cwiseProduct(ct);
      state->gates.col(col) = z;  // overwrite with activated gates
      state->c.col(col) = c;
      state->ct.col(col) = ct;
      state->h.col(col) = h;
      out.col(col) = h;
      h_prev = h;
      c_prev = c;
    }

    Node n = make(std::move(out), needs(x) || needs(w) || needs(r) || needs(b));
    if (rec(n)) {
      nodes_[n.id].backward = [x, w, r, b, state](Graph& g, int id) {
        const Mat& X = g.value(x);
        const Mat& W = g.value(w);
        const Mat& R = g.value(r);
        const Mat& dH = g.nodes_[id].grad;
        const int T = static_cast<int>(X.cols());
        const int H = static_cast<int>(state->h.rows());

        Mat dZ = Mat::Zero(4 * H, T);
        Vec dh_carry = Vec::Zero(H), dc_carry = Vec::Zero(H);
        for (int s = T - 1; s >= 0; --s) {
          const int col = state->reverse ? T - 1 - s : s;
          const int prev_col =
              s > 0 ? (state->reverse ? T - s : s - 1) : -1;
          const Vec z = state->gates.col(col);
          const auto i = z.head(H), f = z.segment(H, H),
                     gg = z.segment(2 * H, H), o = z.tail(H);
          const Vec ct = state->ct.col(col);
          const Vec c_prev =
              prev_col >= 0 ? Vec(state->c.col(prev_col)) : Vec(Vec::Zero(H));

          const Vec dh = dH.col(col) + dh_carry;
          const Vec do_ = dh.cwiseProduct(ct);
          const Vec dc = dh.cwiseProduct(o).cwiseProduct(
                             (1.0 - ct.array().square()).matrix()) +
                         dc_carry;
          const Vec di = dc.cwiseProduct(gg);
          const Vec dgg = dc.cwiseProduct(i);
          const Vec df = dc.cwiseProduct(c_prev);

          Vec dz(4 * H);
          dz.head(H) = di.cwiseProduct(i).cwiseProduct(
              (1.0 - i.array()).matrix());
          dz.segment(H, H) =
              df.cwiseProduct(f).cwiseProduct((1.0 - f.array()).matrix());
          dz.segment(2 * H, H) =
              dgg.cwiseProduct((1.0 - gg.array().square()).matrix());
          dz.tail(H) =
              do_.cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());

          dZ.col(col) = dz;
          dh_carry = R.transpose() * dz;
          dc_carry = dc.cwiseProduct(f);
        }

        // H_prev(:, col(s)) = h at step s-1 (zero for s = 0).
        Mat h_prev_mat = Mat::Zero(H, T);
        for (int s = 1; s < T; ++s) {
          const int col = state->reverse ? T - 1 - s : s;
          const int prev_col = state->reverse ? T - s : s - 1;
          h_prev_mat.col(col) = state->h.col(prev_col);
        }

        if (g.needs(x)) g.accum(x, W.transpose() * dZ);
        if (g.needs(w)) g.accum(w, dZ * X.transpose());
        if (g.needs(r)) g.accum(r, dZ * h_prev_mat.transpose());
        if (g.needs(b)) g.accum(b, dZ.rowwise().sum());
      };
    }
    return n;
  }

  // 1-D convolution over time with centered zero padding.
  // x: Cin x T, w: Cout x (Cin*k), out: Cout x ceil(T/stride).
  Node conv1d(Node x, Node w, Node b, int kernel, int stride) {
    const Mat& X = value(x);
    const Mat& W = value(w);
    const int cin = static_cast<int>(X.rows());
    const int T = static_cast<int>(X.cols());
    require(W.cols() == static_cast<long>(cin) * kernel, Errc::invalid_input,
            "conv1d weight shape mismatch");
    const int to = conv_out_dim(T, stride);
    const int pad_left = conv_pad_left(T, kernel, stride);

    auto cols = std::make_shared<Mat>(Mat::Zero(
        static_cast<long>(cin) * kernel, to));
    for (int t = 0; t < to; ++t) {
      for (int j = 0; j < kernel; ++j) {
        const int src = t * stride - pad_left + j;
        if (src >= 0 && src < T)
          cols->block(static_cast<long>(j) * cin, t, cin, 1) = X.col(src);
      }
    }
    Mat out = (W * (*cols)).colwise() + Vec(value(b).col(0));
    Node n = make(std::move(out), needs(x) || needs(w) || needs(b));
    if (rec(n)) {
      nodes_[n.id].backward = [x, w, b, cols, kernel, stride, pad_left, cin,
                               T](Graph& g, int id) {
        const Mat& go = g.nodes_[id].grad;
        const Mat& W = g.value(w);
        if (g.needs(w)) g.accum(w, go * cols->transpose());
        if (g.needs(b)) g.accum(b, go.rowwise().sum());
        if (g.needs(x)) {
          const Mat dcols = W.transpose() * go;
          Mat dx = Mat::Zero(cin, T);
          for (int t = 0; t < go.cols(); ++t) {
            for (int j = 0; j < kernel; ++j) {
              const int src = t * stride - pad_left + j;
              if (src >= 0 && src < T)
                dx.col(src) +=
                    dcols.block(static_cast<long>(j) * cin, t, cin, 1);
            }
          }
          g.accum(x, dx);
        }
      };
    }
    return n;
  }

  // 2-D convolution with centered zero padding and ceil output dims.
  // x: Cin x (H*W) with cell (i,j) at column i*W + j; w: Cout x (Cin*kh*kw).
  Node conv2d(Node x, Node w, Node b, int height, int width, int kernel,
              int stride, int* out_height = nullptr, int* out_width = nullptr) {
    const Mat& X = value(x);
    const Mat& W = value(w);
    const int cin = static_cast<int>(X.rows());
    require(X.cols() == static_cast<long>(height) * width, Errc::invalid_input,
            "conv2d input shape mismatch");
    require(W.cols() == static_cast<long>(cin) * kernel * kernel,
            Errc::invalid_input, "conv2d weight shape mismatch");
    const int ho = conv_out_dim(height, stride);
    const int wo = conv_out_dim(width, stride);
    const int pad_top = conv_pad_left(height, kernel, stride);
    const int pad_left = conv_pad_left(width, kernel, stride);
    if (out_height) *out_height = ho;
    if (out_width) *out_width = wo;

    auto cols = std::make_shared<Mat>(
        Mat::Zero(static_cast<long>(cin) * kernel * kernel,
                  static_cast<long>(ho) * wo));
    for (int i = 0; i < ho; ++i) {
      for (int j = 0; j < wo; ++j) {
        const long col = static_cast<long>(i) * wo + j;
        for (int ki = 0; ki < kernel; ++ki) {
          for (int kj = 0; kj < kernel; ++kj) {
            const int si = i * stride - pad_top + ki;
            const int sj = j * stride - pad_left + kj;
            if (si >= 0 && si < height && sj >= 0 && sj < width) {
              const long patch = (static_cast<long>(ki) * kernel + kj) * cin;
              cols->block(patch, col, cin, 1) =
                  X.col(static_cast<long>(si) * width + sj);
            }
          }
        }
      }
    }
    Mat out = (W * (*cols)).colwise() + Vec(value(b).col(0));
    Node n = make(std::move(out), needs(x) || needs(w) || needs(b));
    if (rec(n)) {
      nodes_[n.id].backward = [x, w, b, cols, kernel, stride, pad_top,
                               pad_left, cin, height, width, ho,
                               wo](Graph& g, int id) {
        const Mat& go = g.nodes_[id].grad;
        const Mat& W = g.value(w);
        if (g.needs(w)) g.accum(w, go * cols->transpose());
        if (g.needs(b)) g.accum(b, go.rowwise().sum());
        if (g.needs(x)) {
          const Mat dcols = W.transpose() * go;
          Mat dx = Mat::Zero(cin, static_cast<long>(height) * width);
          for (int i = 0; i < ho; ++i) {
            for (int j = 0; j < wo; ++j) {
              const long col = static_cast<long>(i) * wo + j;
              for (int ki = 0; ki < kernel; ++ki) {
                for (int kj = 0; kj < kernel; ++kj) {
                  const int si = i * stride - pad_top + ki;
                  const int sj = j * stride - pad_left + kj;
                  if (si >= 0 && si < height && sj >= 0 && sj < width) {
                    const long patch =
                        (static_cast<long>(ki) * kernel + kj) * cin;
                    dx.col(static_cast<long>(si) * width + sj) +=
                        dcols.block(patch, col, cin, 1);
                  }
                }
              }
            }
          }
          g.accum(x, dx);
        }
      };
    }
    return n;
  }

  // ---- backward ----

  void backward(Node loss) {
    require(recording_, Errc::state, "backward on a non-recording graph");
    require(nodes_[loss.id].value.size() == 1, Errc::invalid_input,
            "backward seed must be a scalar");
    for (auto& nd : nodes_)
      if (nd.grad.size() > 0) nd.grad.setZero();
    ensure_grad(loss.id);
    nodes_[loss.id].grad(0, 0) = 1.0;
    for (int id = loss.id; id >= 0; --id) {
      auto& nd = nodes_[id];
      if (nd.backward && nd.grad.size() > 0 && nd.needs_grad)
        nd.backward(*this, id);
    }
  }

  static int conv_out_dim(int in, int stride) {
    return (in + stride - 1) / stride;
  }

  static int conv_pad_left(int in, int kernel, int stride) {
    const int out = conv_out_dim(in, stride);
    const int pad_total = std::max(0, (out - 1) * stride + kernel - in);
    return pad_total / 2;
  }

  size_t size() const { return nodes_.size(); }

 private:
  struct NodeData {
    Mat value;
    Mat grad;
    bool needs_grad = false;
    std::function<void(Graph&, int)> backward;
  };

  struct LstmState {
    bool reverse = false;
    Mat gates;  // 4H x T, activated gates after forward
    Mat c, ct, h;
  };

  static double sigmoid(double x) {
    return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
  }

  Node make(Mat v, bool needs_grad) {
    nodes_.push_back(NodeData{std::move(v), Mat(), needs_grad && recording_,
                              nullptr});
    return Node{static_cast<int>(nodes_.size()) - 1};
  }

  bool needs(Node n) const { return nodes_[n.id].needs_grad; }
  bool rec(Node n) const { return recording_ && nodes_[n.id].needs_grad; }

  void ensure_grad(int id) {
    auto& nd = nodes_[id];
    if (nd.grad.size() == 0)
      nd.grad = Mat::Zero(nd.value.rows(), nd.value.cols());
  }

  void accum(Node n, const Mat& g) {
    if (!nodes_[n.id].needs_grad) return;
    ensure_grad(n.id);
    nodes_[n.id].grad += g;
  }

  std::vector<NodeData> nodes_;
  bool recording_;
};

}  // namespace vreen::ad

#endif  // VREEN_AUTODIFF_HPP_
