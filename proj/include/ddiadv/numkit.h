/*
 * Copyright 2026 The ddiadv Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DDIADV_NUMKIT_H_
#define DDIADV_NUMKIT_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ddiadv/rng.h"

namespace ddiadv {

// Row-major 64-bit matrix. The owning container for every parameter block.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  // Throws ShapeError when data.size() != rows * cols.
  DenseMatrix(size_t rows, size_t cols, std::vector<double> data);

  static DenseMatrix Identity(size_t n);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool operator==(const DenseMatrix& other) const = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix MatMul(const DenseMatrix& a, const DenseMatrix& b);

// Gradients of sum(upstream .* (a * b)) with respect to a and b.
std::pair<DenseMatrix, DenseMatrix> MatMulBackward(const DenseMatrix& a,
                                                   const DenseMatrix& b,
                                                   const DenseMatrix& upstream);

// A bank of `count` filters, each kernel_rows x kernel_cols, stored
// filter-major then row-major.
struct FilterBank {
  size_t count = 0;
  size_t kernel_rows = 0;
  size_t kernel_cols = 0;
  std::vector<double> weights;

  FilterBank() = default;
  FilterBank(size_t count, size_t kernel_rows, size_t kernel_cols)
      : count(count),
        kernel_rows(kernel_rows),
        kernel_cols(kernel_cols),
        weights(count * kernel_rows * kernel_cols, 0.0) {}

  double& at(size_t f, size_t u, size_t v) {
    return weights[(f * kernel_rows + u) * kernel_cols + v];
  }
  double at(size_t f, size_t u, size_t v) const {
    return weights[(f * kernel_rows + u) * kernel_cols + v];
  }
};

// Feature-map tensor of shape count x rows x cols; flattening order is the
// storage order (filter, row, col).
struct FeatureMaps {
  size_t count = 0;
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;

  double& at(size_t f, size_t i, size_t j) {
    return values[(f * rows + i) * cols + j];
  }
  double at(size_t f, size_t i, size_t j) const {
    return values[(f * rows + i) * cols + j];
  }
};

// Valid padding, stride 1 cross-correlation.
FeatureMaps Conv2dForward(const DenseMatrix& input, const FilterBank& filters);

struct Conv2dGrads {
  DenseMatrix input;
  FilterBank filters;
};

Conv2dGrads Conv2dBackward(const DenseMatrix& input, const FilterBank& filters,
                           const FeatureMaps& upstream);

// softmax(logits / temperature) with max subtraction.
std::vector<double> Softmax(std::span<const double> logits, double temperature);

// Backward of Softmax given its output `probs`.
std::vector<double> SoftmaxBackward(std::span<const double> probs,
                                    std::span<const double> upstream,
                                    double temperature);

inline constexpr double kGumbelUniformClamp = 1e-12;

// g_i = -log(-log U_i), U_i clamped to [1e-12, 1 - 1e-12].
std::vector<double> GumbelNoise(size_t n, Rng& rng);
double GumbelFromUniform(double u);

// y = x * weights + bias, x of length weights.rows().
std::vector<double> LinearForward(std::span<const double> x,
                                  const DenseMatrix& weights,
                                  std::span<const double> bias);

// Accumulates dW and db into the given buffers; returns dx.
std::vector<double> LinearBackward(std::span<const double> x,
                                   const DenseMatrix& weights,
                                   std::span<const double> upstream,
                                   DenseMatrix& grad_weights,
                                   std::span<double> grad_bias);

inline constexpr double kAdagradEpsilon = 1e-8;

struct AdagradState {
  std::vector<double> accumulator;
  double epsilon = kAdagradEpsilon;

  AdagradState() = default;
  explicit AdagradState(size_t n) : accumulator(n, 0.0) {}
};

// acc += g^2; p -= lr * g / (sqrt(acc) + eps), applied to
// accumulator[offset, offset + params.size()). A non-finite gradient raises
// TrainingError naming `name` before anything is modified.
void AdagradStep(std::span<double> params, std::span<const double> grads,
                 AdagradState& state, double lr, std::string_view name,
                 size_t offset = 0);

void ClipParams(std::span<double> params, double bound);

inline constexpr double kFiniteDifferenceStep = 1e-3;

// Max over coordinates of |fd - analytic| / max(1, |fd|, |analytic|) with
// central differences of step h.
double FiniteDifferenceCheck(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, std::span<const double> analytic,
    double h = kFiniteDifferenceStep);

bool AllFinite(std::span<const double> values);

}  // namespace ddiadv

#endif  // DDIADV_NUMKIT_H_
