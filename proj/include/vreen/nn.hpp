// vreen/nn.hpp

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

#ifndef VREEN_NN_HPP_
#define VREEN_NN_HPP_

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vreen/autodiff.hpp"
#include "vreen/common.hpp"

namespace vreen::nn {

using ad::Graph;
using ad::Node;
using ad::Tensor;

// Maps tensors to graph nodes, caching so a tensor shared between forward
// passes in the same graph binds once.  Frozen tensors and non-trainable
// bindings become constant inputs.
class Binder {
 public:
  Binder(Graph& g, bool trainable) : g_(g), trainable_(trainable) {}

  Node operator()(Tensor& t) {
    auto it = cache_.find(&t);
    if (it != cache_.end()) return it->second;
    Node n = (trainable_ && !t.frozen) ? g_.param(t) : g_.input(t.value);
    cache_.emplace(&t, n);
    return n;
  }

 private:
  Graph& g_;
  bool trainable_;
  std::unordered_map<const Tensor*, Node> cache_;
};

using TensorVisitor = std::function<void(Tensor&)>;

inline Mat uniform_init(Rng& rng, long rows, long cols, long fan_in) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(1L, fan_in)));
  Mat m(rows, cols);
  for (long j = 0; j < cols; ++j)
    for (long i = 0; i < rows; ++i)
      m(i, j) = rng.uniform(-bound, bound);
  return m;
}

struct Dense {
  Tensor W, b;

  void init(Rng& rng, int out, int in, const std::string& name) {
    W = Tensor(name + "/W", uniform_init(rng, out, in, in));
    b = Tensor(name + "/b", Mat::Zero(out, 1));
  }

  Node apply(Graph& g, Binder& bind, Node x) const {
    auto& self = const_cast<Dense&>(*this);
    return g.add_col_bias(g.matmul(bind(self.W), x), bind(self.b));
  }

  void visit(const TensorVisitor& fn) {
    fn(W);
    fn(b);
  }
};

// One LSTM direction; gate rows ordered [input; forget; cell; output].
struct LstmDir {
  Tensor W, R, b;
  bool reverse = false;

  void init(Rng& rng, int hidden, int in, bool rev, const std::string& name) {
    reverse = rev;
    W = Tensor(name + "/W", uniform_init(rng, 4L * hidden, in, in));
    R = Tensor(name + "/R", uniform_init(rng, 4L * hidden, hidden, hidden));
    Mat bias = Mat::Zero(4L * hidden, 1);
    bias.block(hidden, 0, hidden, 1).setOnes();  // forget gate bias 1
    b = Tensor(name + "/b", bias);
  }

  Node apply(Graph& g, Binder& bind, Node x) const {
    auto& self = const_cast<LstmDir&>(*this);
    return g.lstm(x, bind(self.W), bind(self.R), bind(self.b), reverse);
  }

  void visit(const TensorVisitor& fn) {
    fn(W);
    fn(R);
    fn(b);
  }
};

// Bidirectional layer; the two direction outputs are summed, keeping the
// layer width equal to `hidden`.
struct BiLstm {
  LstmDir fwd, bwd;

  void init(Rng& rng, int hidden, int in, const std::string& name) {
    fwd.init(rng, hidden, in, false, name + "/fwd");
    bwd.init(rng, hidden, in, true, name + "/bwd");
  }

  Node apply(Graph& g, Binder& bind, Node x) const {
    return g.add(fwd.apply(g, bind, x), bwd.apply(g, bind, x));
  }

  void visit(const TensorVisitor& fn) {
    fwd.visit(fn);
    bwd.visit(fn);
  }
};

struct Conv1dLayer {
  Tensor W, b;
  int kernel = 3;
  int stride = 1;

  void init(Rng& rng, int out_ch, int in_ch, int k, int s,
            const std::string& name) {
    kernel = k;
    stride = s;
    W = Tensor(name + "/W",
               uniform_init(rng, out_ch, static_cast<long>(in_ch) * k,
                            static_cast<long>(in_ch) * k));
    b = Tensor(name + "/b", Mat::Zero(out_ch, 1));
  }

  Node apply(Graph& g, Binder& bind, Node x) const {
    auto& self = const_cast<Conv1dLayer&>(*this);
    return g.conv1d(x, bind(self.W), bind(self.b), kernel, stride);
  }

  void visit(const TensorVisitor& fn) {
    fn(W);
    fn(b);
  }
};

struct Conv2dLayer {
  Tensor W, b;
  int kernel = 3;
  int stride = 2;

  void init(Rng& rng, int out_ch, int in_ch, int k, int s,
            const std::string& name) {
    kernel = k;
    stride = s;
    W = Tensor(name + "/W",
               uniform_init(rng, out_ch, static_cast<long>(in_ch) * k * k,
                            static_cast<long>(in_ch) * k * k));
    b = Tensor(name + "/b", Mat::Zero(out_ch, 1));
  }

  Node apply(Graph& g, Binder& bind, Node x, int height, int width,
             int* out_h, int* out_w) const {
    auto& self = const_cast<Conv2dLayer&>(*this);
    return g.conv2d(x, bind(self.W), bind(self.b), height, width, kernel,
                    stride, out_h, out_w);
  }

  void visit(const TensorVisitor& fn) {
    fn(W);
    fn(b);
  }
};

struct EmbeddingLayer {
  Tensor table;  // dim x vocab

  void init(Rng& rng, int dim, int vocab, const std::string& name) {
    table = Tensor(name + "/table", uniform_init(rng, dim, vocab, 1));
  }

  Node apply(Graph& g, Binder& bind, const std::vector<int>& ids) const {
    auto& self = const_cast<EmbeddingLayer&>(*this);
    return g.embedding(bind(self.table), ids);
  }

  void visit(const TensorVisitor& fn) { fn(table); }
};

}  // namespace vreen::nn

#endif  // VREEN_NN_HPP_
