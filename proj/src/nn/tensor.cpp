// SPDX-License-Identifier: Apache-2.0
#include "splicedet/nn/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace splicedet::nn {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(shape_product(shape_), fill) {}

Tensor Tensor::from(std::vector<std::size_t> shape,
                    std::vector<double> values) {
  if (shape_product(shape) != values.size()) {
    throw std::invalid_argument("Tensor::from: shape does not match value count");
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::scalar(double v) { return from({1}, {v}); }

std::size_t Tensor::rows() const {
  if (shape_.size() != 2) throw std::invalid_argument("Tensor: not a matrix");
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (shape_.size() != 2) throw std::invalid_argument("Tensor: not a matrix");
  return shape_[1];
}

double& Tensor::at(std::size_t r, std::size_t c) {
  return data_[r * cols() + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return data_[r * cols() + c];
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::fill(double v) {
  for (auto& x : data_) x = v;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << ", ";
    os << shape_[i];
  }
  os << "]";
  return os.str();
}

}  // namespace splicedet::nn
