#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense float kernels used by the classifier's inner loops. Each backend
// fills a Kernels table; the active table is picked once at startup from
// the host CPU and can be overridden (tests, reproducibility runs).
namespace langid::simd {

enum class Backend { kScalar, kAvx2 };

struct Kernels {
  Backend backend;
  const char* name;
  // sum_i a[i] * b[i]; a and b have the same length.
  float (*dot)(std::span<const float> a, std::span<const float> b);
  // y += alpha * x
  void (*axpy)(float alpha, std::span<const float> x, std::span<float> y);
  // x *= alpha
  void (*scale)(float alpha, std::span<float> x);
  float (*max)(std::span<const float> x);
};

const Kernels& scalar_kernels();
// nullptr when the AVX2 variant was not compiled in.
const Kernels* avx2_kernels();

bool cpu_supports(Backend backend);
bool available(Backend backend);
Backend best_backend();

/// The table every caller should use.
const Kernels& active();

/// Throws Error(kInvalidArgument) if the backend is unavailable here.
void set_backend(Backend backend);

std::string_view backend_name(Backend backend);
/// "auto", "scalar" or "avx2"; auto resolves to best_backend().
Backend parse_backend(std::string_view name);

}  // namespace langid::simd
