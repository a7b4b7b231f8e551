#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "langid/model.hpp"

// Precision-generic form of the classifier's loss and its analytic gradient.
// Training runs the float kernels in sgd_step(); this header exists so the
// same math can be evaluated in double for gradient checking and so that
// sgd_step() can be compared against an explicit gradient.
namespace langid {

template <class T>
struct DenseParams {
  size_t dim = 0;
  size_t rows = 0;    // embedding rows (W + B)
  size_t labels = 0;
  std::vector<T> input;   // rows x dim
  std::vector<T> output;  // labels x dim
};

template <class T>
DenseParams<T> to_dense(const Model& model) {
  DenseParams<T> p;
  p.dim = model.dim();
  p.rows = model.input.rows();
  p.labels = model.num_labels();
  p.input.assign(model.input.data().begin(), model.input.data().end());
  p.output.assign(model.output.data().begin(), model.output.data().end());
  return p;
}

template <class T>
std::vector<T> dense_probs(const DenseParams<T>& p, std::span<const int32_t> features,
                           std::vector<T>* hidden_out = nullptr) {
  std::vector<T> hidden(p.dim, T(0));
  for (int32_t id : features) {
    for (size_t d = 0; d < p.dim; ++d) hidden[d] += p.input[id * p.dim + d];
  }
  for (T& v : hidden) v /= static_cast<T>(features.size());
  std::vector<T> z(p.labels, T(0));
  for (size_t i = 0; i < p.labels; ++i) {
    for (size_t d = 0; d < p.dim; ++d) z[i] += p.output[i * p.dim + d] * hidden[d];
  }
  const T top = *std::max_element(z.begin(), z.end());
  T sum = 0;
  for (T& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (T& v : z) v /= sum;
  if (hidden_out != nullptr) *hidden_out = std::move(hidden);
  return z;
}

/// -log softmax(output * mean(input[features]))[target]
template <class T>
T dense_loss(const DenseParams<T>& p, std::span<const int32_t> features, int target) {
  return -std::log(dense_probs(p, features)[target]);
}

/// Gradient of dense_loss. `grad` must be shaped like `p`; it is overwritten.
/// Rows of `grad.input` not touched by `features` are zero.
template <class T>
void dense_gradient(const DenseParams<T>& p, std::span<const int32_t> features,
                    int target, DenseParams<T>& grad) {
  std::vector<T> hidden;
  std::vector<T> g = dense_probs(p, features, &hidden);
  g[target] -= T(1);

  grad.dim = p.dim;
  grad.rows = p.rows;
  grad.labels = p.labels;
  grad.output.assign(p.output.size(), T(0));
  grad.input.assign(p.input.size(), T(0));

  std::vector<T> hidden_grad(p.dim, T(0));
  for (size_t i = 0; i < p.labels; ++i) {
    for (size_t d = 0; d < p.dim; ++d) {
      grad.output[i * p.dim + d] = g[i] * hidden[d];
      hidden_grad[d] += g[i] * p.output[i * p.dim + d];
    }
  }
  const T share = T(1) / static_cast<T>(features.size());
  for (int32_t id : features) {
    for (size_t d = 0; d < p.dim; ++d) grad.input[id * p.dim + d] += share * hidden_grad[d];
  }
}

}  // namespace langid
