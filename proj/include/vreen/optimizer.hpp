// vreen/optimizer.hpp

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

#ifndef VREEN_OPTIMIZER_HPP_
#define VREEN_OPTIMIZER_HPP_

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "vreen/autodiff.hpp"
#include "vreen/common.hpp"
#include "vreen/io.hpp"

namespace vreen::opt {

using ad::Tensor;

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 5.0;  // global gradient norm across the tensor group
};

class Adam {
 public:
  AdamConfig cfg;

  explicit Adam(AdamConfig c = {}) : cfg(c) {}

  // Applies one update to every non-frozen tensor in the group, clipping by
  // the global gradient norm first, then clears the consumed gradients.
  void step(const std::vector<Tensor*>& tensors) {
    double sq = 0.0;
    for (const Tensor* t : tensors)
      if (!t->frozen) sq += t->grad.squaredNorm();
    const double norm = std::sqrt(sq);
    require(std::isfinite(norm), Errc::invalid_input,
            "non-finite gradient norm");
    const double scale =
        (cfg.clip_norm > 0 && norm > cfg.clip_norm) ? cfg.clip_norm / norm
                                                    : 1.0;
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (Tensor* t : tensors) {
      if (t->frozen) {
        t->grad.setZero();
        continue;
      }
      auto& [m, v] = moments_try_emplace(*t);
      const Mat grad = t->grad * scale;
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
      const Mat m_hat = m / bc1;
      const Mat v_hat = v / bc2;
      t->value -=
          cfg.lr * m_hat.cwiseQuotient(
                       (v_hat.cwiseSqrt().array() + cfg.eps).matrix());
      require(t->value.allFinite(), Errc::invalid_input,
              "non-finite parameter after update: " + t->name);
      t->grad.setZero();
    }
  }

  long step_count() const { return t_; }

  void append_to(io::Checkpoint& ck, const std::string& prefix) const {
    ck.metadata[prefix + "_t"] = t_;
    for (const auto& [name, mv] : moments_) {
      ck.tensors.push_back(io::CheckpointTensor{
          prefix + "/" + name + "/m", mv.first.rows(), mv.first.cols(), false,
          mv.first});
      ck.tensors.push_back(io::CheckpointTensor{
          prefix + "/" + name + "/v", mv.second.rows(), mv.second.cols(),
          false, mv.second});
    }
  }

  void load_from(const io::Checkpoint& ck, const std::string& prefix) {
    t_ = ck.metadata.value(prefix + "_t", 0L);
    moments_.clear();
    const std::string head = prefix + "/";
    for (const auto& t : ck.tensors) {
      if (t.name.rfind(head, 0) != 0) continue;
      const std::string rest = t.name.substr(head.size());
      if (rest.size() < 2) continue;
      const std::string base = rest.substr(0, rest.size() - 2);
      if (rest.compare(rest.size() - 2, 2, "/m") == 0)
        moments_[base].first = t.value;
      else if (rest.compare(rest.size() - 2, 2, "/v") == 0)
        moments_[base].second = t.value;
    }
  }

 private:
  std::pair<Mat, Mat>& moments_try_emplace(const Tensor& t) {
    auto it = moments_.find(t.name);
    if (it == moments_.end())
      it = moments_
               .emplace(t.name,
                        std::make_pair(Mat::Zero(t.value.rows(),
                                                 t.value.cols()),
                                       Mat::Zero(t.value.rows(),
                                                 t.value.cols())))
               .first;
    return it->second;
  }

  long t_ = 0;
  std::map<std::string, std::pair<Mat, Mat>> moments_;
};

}  // namespace vreen::opt

#endif  // VREEN_OPTIMIZER_HPP_
