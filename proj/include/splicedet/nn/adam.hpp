// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "splicedet/nn/autograd.hpp"

namespace splicedet::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

// Adam with bias correction. step() consumes the gradients accumulated on the
// tracked parameters and zeroes them afterwards.
class Adam {
 public:
  Adam(std::vector<Var> params, AdamConfig cfg = {});

  void step();
  std::size_t steps_taken() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  const std::vector<Var>& params() const { return params_; }

 private:
  std::vector<Var> params_;
  AdamConfig cfg_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::size_t t_ = 0;
};

}  // namespace splicedet::nn
