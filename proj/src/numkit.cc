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

#include "ddiadv/numkit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ddiadv/error.h"

namespace ddiadv {
namespace {

std::string ShapeString(size_t r, size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

DenseMatrix::DenseMatrix(size_t rows, size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                     " does not match shape " + ShapeString(rows, cols));
  }
}

DenseMatrix DenseMatrix::Identity(size_t n) {
  DenseMatrix m(n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix MatMul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + ShapeString(a.rows(), a.cols()) + " x " +
                     ShapeString(b.rows(), b.cols()));
  }
  DenseMatrix out(a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

std::pair<DenseMatrix, DenseMatrix> MatMulBackward(
    const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& upstream) {
  if (a.cols() != b.rows() || upstream.rows() != a.rows() ||
      upstream.cols() != b.cols()) {
    throw ShapeError("matmul backward: inconsistent shapes");
  }
  DenseMatrix grad_a(a.rows(), a.cols());
  DenseMatrix grad_b(b.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t k = 0; k < a.cols(); ++k) {
      double acc = 0.0;
      for (size_t j = 0; j < b.cols(); ++j) acc += upstream(i, j) * b(k, j);
      grad_a(i, k) = acc;
    }
  }
  for (size_t k = 0; k < b.rows(); ++k) {
    for (size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (size_t i = 0; i < a.rows(); ++i) acc += a(i, k) * upstream(i, j);
      grad_b(k, j) = acc;
    }
  }
  return {std::move(grad_a), std::move(grad_b)};
}

FeatureMaps Conv2dForward(const DenseMatrix& input, const FilterBank& filters) {
  if (filters.kernel_rows == 0 || filters.kernel_cols == 0 ||
      filters.kernel_rows > input.rows() ||
      filters.kernel_cols > input.cols()) {
    throw ShapeError("conv2d: kernel " +
                     ShapeString(filters.kernel_rows, filters.kernel_cols) +
                     " does not fit input " +
                     ShapeString(input.rows(), input.cols()));
  }
  if (filters.weights.size() !=
      filters.count * filters.kernel_rows * filters.kernel_cols) {
    throw ShapeError("conv2d: filter bank storage size mismatch");
  }
  FeatureMaps out;
  out.count = filters.count;
  out.rows = input.rows() - filters.kernel_rows + 1;
  out.cols = input.cols() - filters.kernel_cols + 1;
  out.values.assign(out.count * out.rows * out.cols, 0.0);
  for (size_t f = 0; f < filters.count; ++f) {
    for (size_t i = 0; i < out.rows; ++i) {
      for (size_t j = 0; j < out.cols; ++j) {
        double acc = 0.0;
        for (size_t u = 0; u < filters.kernel_rows; ++u) {
          for (size_t v = 0; v < filters.kernel_cols; ++v) {
            acc += input(i + u, j + v) * filters.at(f, u, v);
          }
        }
        out.at(f, i, j) = acc;
      }
    }
  }
  return out;
}

Conv2dGrads Conv2dBackward(const DenseMatrix& input, const FilterBank& filters,
                           const FeatureMaps& upstream) {
  if (filters.kernel_rows == 0 || filters.kernel_cols == 0 ||
      filters.kernel_rows > input.rows() ||
      filters.kernel_cols > input.cols() || upstream.count != filters.count ||
      upstream.rows != input.rows() - filters.kernel_rows + 1 ||
      upstream.cols != input.cols() - filters.kernel_cols + 1 ||
      upstream.values.size() != upstream.count * upstream.rows * upstream.cols) {
    throw ShapeError("conv2d backward: upstream shape does not match forward");
  }
  Conv2dGrads grads{DenseMatrix(input.rows(), input.cols()),
                    FilterBank(filters.count, filters.kernel_rows,
                               filters.kernel_cols)};
  for (size_t f = 0; f < filters.count; ++f) {
    for (size_t i = 0; i < upstream.rows; ++i) {
      for (size_t j = 0; j < upstream.cols; ++j) {
        const double g = upstream.at(f, i, j);
        if (g == 0.0) continue;
        for (size_t u = 0; u < filters.kernel_rows; ++u) {
          for (size_t v = 0; v < filters.kernel_cols; ++v) {
            grads.filters.at(f, u, v) += input(i + u, j + v) * g;
            grads.input(i + u, j + v) += filters.at(f, u, v) * g;
          }
        }
      }
    }
  }
  return grads;
}

std::vector<double> Softmax(std::span<const double> logits,
                            double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw DomainError("softmax: temperature must be positive, got " +
                      std::to_string(temperature));
  }
  if (logits.empty()) return {};
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - max_logit) / temperature);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

std::vector<double> SoftmaxBackward(std::span<const double> probs,
                                    std::span<const double> upstream,
                                    double temperature) {
  if (probs.size() != upstream.size()) {
    throw ShapeError("softmax backward: length mismatch");
  }
  double dot = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) dot += probs[i] * upstream[i];
  std::vector<double> grad(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) {
    grad[i] = probs[i] * (upstream[i] - dot) / temperature;
  }
  return grad;
}

double GumbelFromUniform(double u) {
  u = std::clamp(u, kGumbelUniformClamp, 1.0 - kGumbelUniformClamp);
  return -std::log(-std::log(u));
}

std::vector<double> GumbelNoise(size_t n, Rng& rng) {
  std::vector<double> g(n);
  for (double& x : g) x = GumbelFromUniform(rng.Uniform());
  return g;
}

std::vector<double> LinearForward(std::span<const double> x,
                                  const DenseMatrix& weights,
                                  std::span<const double> bias) {
  if (x.size() != weights.rows() || bias.size() != weights.cols()) {
    throw ShapeError("linear: input " + std::to_string(x.size()) +
                     " vs weights " +
                     ShapeString(weights.rows(), weights.cols()));
  }
  std::vector<double> y(bias.begin(), bias.end());
  for (size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const auto w = weights.row(i);
    for (size_t j = 0; j < y.size(); ++j) y[j] += xi * w[j];
  }
  return y;
}

std::vector<double> LinearBackward(std::span<const double> x,
                                   const DenseMatrix& weights,
                                   std::span<const double> upstream,
                                   DenseMatrix& grad_weights,
                                   std::span<double> grad_bias) {
  if (x.size() != weights.rows() || upstream.size() != weights.cols() ||
      grad_weights.rows() != weights.rows() ||
      grad_weights.cols() != weights.cols() ||
      grad_bias.size() != weights.cols()) {
    throw ShapeError("linear backward: inconsistent shapes");
  }
  std::vector<double> grad_x(x.size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    const auto w = weights.row(i);
    auto gw = grad_weights.row(i);
    double acc = 0.0;
    for (size_t j = 0; j < upstream.size(); ++j) {
      acc += w[j] * upstream[j];
      gw[j] += x[i] * upstream[j];
    }
    grad_x[i] = acc;
  }
  for (size_t j = 0; j < upstream.size(); ++j) grad_bias[j] += upstream[j];
  return grad_x;
}

void AdagradStep(std::span<double> params, std::span<const double> grads,
                 AdagradState& state, double lr, std::string_view name,
                 size_t offset) {
  if (params.size() != grads.size() ||
      offset + params.size() > state.accumulator.size()) {
    throw ShapeError("adagrad: shape mismatch for " + std::string(name));
  }
  for (size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw TrainingError("non-finite gradient in " + std::string(name) +
                          " at index " + std::to_string(offset + i));
    }
  }
  for (size_t i = 0; i < params.size(); ++i) {
    double& acc = state.accumulator[offset + i];
    acc += grads[i] * grads[i];
    params[i] -= lr * grads[i] / (std::sqrt(acc) + state.epsilon);
  }
}

void ClipParams(std::span<double> params, double bound) {
  for (double& p : params) p = std::clamp(p, -bound, bound);
}

double FiniteDifferenceCheck(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, std::span<const double> analytic, double h) {
  if (x.size() != analytic.size()) {
    throw ShapeError("finite difference: gradient length mismatch");
  }
  std::vector<double> probe(x.begin(), x.end());
  double worst = 0.0;
  for (size_t i = 0; i < probe.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double plus = f(probe);
    probe[i] = saved - h;
    const double minus = f(probe);
    probe[i] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw OracleError("finite difference: non-finite objective at index " +
                        std::to_string(i));
    }
    const double fd = (plus - minus) / (2.0 * h);
    const double denom =
        std::max({1.0, std::fabs(fd), std::fabs(analytic[i])});
    worst = std::max(worst, std::fabs(fd - analytic[i]) / denom);
  }
  return worst;
}

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace ddiadv
