// SPDX-License-Identifier: Apache-2.0
#include "splicedet/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "splicedet/errors.hpp"

namespace splicedet::nn {

void AdamConfig::validate() const {
  if (lr <= 0.0 || !(beta1 >= 0.0 && beta1 < 1.0) ||
      !(beta2 >= 0.0 && beta2 < 1.0) || eps <= 0.0) {
    throw UsageError("adam config: need lr > 0, betas in [0,1), eps > 0");
  }
}

Adam::Adam(std::vector<Var> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  cfg_.validate();
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    if (!p || !p->needs_grad) {
      throw std::invalid_argument("adam: every entry must be a parameter");
    }
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Node& p = *params_[pi];
    Tensor& m = m_[pi];
    Tensor& v = v_[pi];
    const std::size_t sz = p.value.size();
    for (std::size_t i = 0; i < sz; ++i) {
      const double g = p.grad[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p.value[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    p.grad.zero();
  }
}

}  // namespace splicedet::nn
