// Built with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>

#include "langid/simd.hpp"

namespace langid::simd {
namespace {

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

float dot_avx2(std::span<const float> a, std::span<const float> b) {
  const size_t n = a.size();
  const float* pa = a.data();
  const float* pb = b.data();
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(pa + i), _mm256_loadu_ps(pb + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(pa + i + 8), _mm256_loadu_ps(pb + i + 8),
                           acc1);
  }
  if (i + 8 <= n) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(pa + i), _mm256_loadu_ps(pb + i), acc0);
    i += 8;
  }
  float sum = hsum(_mm256_add_ps(acc0, acc1));
  for (; i < n; ++i) sum += pa[i] * pb[i];
  return sum;
}

void axpy_avx2(float alpha, std::span<const float> x, std::span<float> y) {
  const size_t n = x.size();
  const float* px = x.data();
  float* py = y.data();
  const __m256 va = _mm256_set1_ps(alpha);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(py + i,
                     _mm256_fmadd_ps(va, _mm256_loadu_ps(px + i), _mm256_loadu_ps(py + i)));
  }
  for (; i < n; ++i) py[i] += alpha * px[i];
}

void scale_avx2(float alpha, std::span<float> x) {
  const size_t n = x.size();
  float* p = x.data();
  const __m256 va = _mm256_set1_ps(alpha);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(p + i, _mm256_mul_ps(va, _mm256_loadu_ps(p + i)));
  }
  for (; i < n; ++i) p[i] *= alpha;
}

float max_avx2(std::span<const float> x) {
  const size_t n = x.size();
  const float* p = x.data();
  size_t i = 0;
  float m = p[0];
  if (n >= 8) {
    __m256 vm = _mm256_loadu_ps(p);
    for (i = 8; i + 8 <= n; i += 8) vm = _mm256_max_ps(vm, _mm256_loadu_ps(p + i));
    alignas(32) float lanes[8];
    _mm256_store_ps(lanes, vm);
    m = *std::max_element(lanes, lanes + 8);
  }
  for (; i < n; ++i) m = std::max(m, p[i]);
  return m;
}

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels table{Backend::kAvx2, "avx2", dot_avx2,
                             axpy_avx2,      scale_avx2, max_avx2};
  return &table;
}

}  // namespace langid::simd
