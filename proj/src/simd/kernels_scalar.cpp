#include <algorithm>

#include "langid/simd.hpp"

namespace langid::simd {
namespace {

float dot_scalar(std::span<const float> a, std::span<const float> b) {
  float sum = 0.0f;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(float alpha, std::span<const float> x, std::span<float> y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale_scalar(float alpha, std::span<float> x) {
  for (float& v : x) v *= alpha;
}

float max_scalar(std::span<const float> x) {
  float m = x[0];
  for (size_t i = 1; i < x.size(); ++i) m = std::max(m, x[i]);
  return m;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels table{Backend::kScalar, "scalar", dot_scalar,
                             axpy_scalar,      scale_scalar, max_scalar};
  return table;
}

}  // namespace langid::simd
