// Copyright (c) 2026 The WPT Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wpt/error.h"

namespace wpt {

enum class Activation { kLinear, kTanh, kSelu };

namespace detail {
inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;
}  // namespace detail

// Fully connected network over column-batched inputs (features x batch).
// Parameters live in one flat vector; layer l stores W_l (out x in,
// column-major) followed by b_l (out).
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // Values saved by a training forward pass.
  struct Tape {
    std::vector<Matrix> inputs;  // input of each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
    Matrix mask;                 // dropout multipliers (empty when off)
  };

  // dims = {in, h_1, ..., out}; one activation per layer. Dropout with keep
  // probability `keep_prob` follows the activation of layer `dropout_layer`
  // (-1 disables it).
  Mlp(std::vector<int> dims, std::vector<Activation> acts, double keep_prob = 1.0,
      int dropout_layer = -1)
      : dims_(std::move(dims)), acts_(std::move(acts)), keep_(keep_prob), dropout_layer_(dropout_layer) {
    if (dims_.size() < 2 || acts_.size() != dims_.size() - 1) {
      throw Error(ErrorCode::kInvalidConfig, "mlp needs one activation per layer");
    }
    for (int d : dims_)
      if (d < 1) throw Error(ErrorCode::kInvalidConfig, "mlp layer widths must be >= 1");
    if (!(keep_ > 0.0 && keep_ <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "keep_prob must be in (0, 1]");
    if (dropout_layer_ >= static_cast<int>(layers())) {
      throw Error(ErrorCode::kInvalidConfig, "dropout layer out of range");
    }
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers(); ++l) {
      offsets_.push_back(off);
      off += static_cast<std::size_t>(dims_[l + 1]) * (dims_[l] + 1);
    }
    params_ = Vector::Zero(static_cast<Eigen::Index>(off));
  }

  std::size_t layers() const { return acts_.size(); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<Activation>& activations() const { return acts_; }
  double keep_prob() const { return keep_; }
  int dropout_layer() const { return dropout_layer_; }
  Eigen::Index num_params() const { return params_.size(); }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  // LeCun-uniform weights, zero biases.
  void init(std::mt19937_64& rng) {
    for (std::size_t l = 0; l < layers(); ++l) {
      const double bound = std::sqrt(3.0 / dims_[l]);
      std::uniform_real_distribution<double> u(-bound, bound);
      auto w = weight(l);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(u(rng));
      bias(l).setZero();
    }
  }

  Eigen::Map<Matrix> weight(std::size_t l) {
    return {params_.data() + offsets_[l], dims_[l + 1], dims_[l]};
  }
  Eigen::Map<const Matrix> weight(std::size_t l) const {
    return {params_.data() + offsets_[l], dims_[l + 1], dims_[l]};
  }
  Eigen::Map<Vector> bias(std::size_t l) {
    return {params_.data() + offsets_[l] + static_cast<std::size_t>(dims_[l + 1]) * dims_[l], dims_[l + 1]};
  }
  Eigen::Map<const Vector> bias(std::size_t l) const {
    return {params_.data() + offsets_[l] + static_cast<std::size_t>(dims_[l + 1]) * dims_[l], dims_[l + 1]};
  }

  // Inference when `dropout_rng` is null; otherwise inverted dropout is
  // sampled from it. `tape` receives what backward() needs.
  Matrix forward(const Matrix& x, Tape* tape = nullptr, std::mt19937_64* dropout_rng = nullptr) const {
    if (x.rows() != dims_.front()) {
      throw Error(ErrorCode::kShapeMismatch, "mlp input has " + std::to_string(x.rows()) +
                                                 " features, expected " + std::to_string(dims_.front()));
    }
    if (tape) {
      tape->inputs.clear();
      tape->pre.clear();
      tape->mask.resize(0, 0);
    }
    Matrix a = x;
    for (std::size_t l = 0; l < layers(); ++l) {
      Matrix z = weight(l) * a;
      z.colwise() += bias(l);
      if (tape) {
        tape->inputs.push_back(std::move(a));
        tape->pre.push_back(z);
      }
      a = activate(acts_[l], z);
      if (static_cast<int>(l) == dropout_layer_ && dropout_rng && keep_ < 1.0) {
        std::bernoulli_distribution keep(keep_);
        Matrix mask(a.rows(), a.cols());
        for (Eigen::Index i = 0; i < mask.size(); ++i) {
          mask.data()[i] = keep(*dropout_rng) ? static_cast<Scalar>(1.0 / keep_) : Scalar(0);
        }
        a = a.cwiseProduct(mask);
        if (tape) tape->mask = std::move(mask);
      }
    }
    return a;
  }

  // Gradient of a scalar loss w.r.t. the flat parameters, given dL/d(output).
  Vector backward(const Tape& tape, const Matrix& grad_out) const {
    Vector grad = Vector::Zero(params_.size());
    Matrix g = grad_out;
    for (std::size_t l = layers(); l-- > 0;) {
      if (static_cast<int>(l) == dropout_layer_ && tape.mask.size() != 0) g = g.cwiseProduct(tape.mask);
      g = g.cwiseProduct(derivative(acts_[l], tape.pre[l]));
      Eigen::Map<Matrix> gw(grad.data() + offsets_[l], dims_[l + 1], dims_[l]);
      gw.noalias() = g * tape.inputs[l].transpose();
      Eigen::Map<Vector>(grad.data() + offsets_[l] + static_cast<std::size_t>(dims_[l + 1]) * dims_[l],
                         dims_[l + 1]) = g.rowwise().sum();
      if (l > 0) g = (weight(l).transpose() * g).eval();
    }
    return grad;
  }

  static Matrix activate(Activation act, const Matrix& z) {
    switch (act) {
      case Activation::kLinear: return z;
      case Activation::kTanh: return z.array().tanh().matrix();
      case Activation::kSelu:
        return z.unaryExpr([](Scalar v) {
          return v > Scalar(0) ? static_cast<Scalar>(detail::kSeluLambda) * v
                               : static_cast<Scalar>(detail::kSeluLambda * detail::kSeluAlpha) *
                                     std::expm1(v);
        });
    }
    return z;
  }

  static Matrix derivative(Activation act, const Matrix& z) {
    switch (act) {
      case Activation::kLinear: return Matrix::Ones(z.rows(), z.cols());
      case Activation::kTanh: return (Scalar(1) - z.array().tanh().square()).matrix();
      case Activation::kSelu:
        return z.unaryExpr([](Scalar v) {
          return v > Scalar(0) ? static_cast<Scalar>(detail::kSeluLambda)
                               : static_cast<Scalar>(detail::kSeluLambda * detail::kSeluAlpha) *
                                     std::exp(v);
        });
    }
    return z;
  }

 private:
  std::vector<int> dims_;
  std::vector<Activation> acts_;
  double keep_;
  int dropout_layer_;
  std::vector<std::size_t> offsets_;
  Vector params_;
};

}  // namespace wpt
