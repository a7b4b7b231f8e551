#include <atomic>
#include <string>

#include "langid/error.hpp"
#include "langid/simd.hpp"

namespace langid::simd {

#ifndef LANGID_HAVE_AVX2
const Kernels* avx2_kernels() { return nullptr; }
#endif

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

bool available(Backend backend) {
  if (backend == Backend::kAvx2 && avx2_kernels() == nullptr) return false;
  return cpu_supports(backend);
}

Backend best_backend() {
  return available(Backend::kAvx2) ? Backend::kAvx2 : Backend::kScalar;
}

namespace {

const Kernels& table_for(Backend backend) {
  return backend == Backend::kAvx2 ? *avx2_kernels() : scalar_kernels();
}

std::atomic<const Kernels*>& active_slot() {
  static std::atomic<const Kernels*> slot{&table_for(best_backend())};
  return slot;
}

}  // namespace

const Kernels& active() { return *active_slot().load(std::memory_order_acquire); }

void set_backend(Backend backend) {
  if (!available(backend)) {
    throw Error(Errc::kInvalidArgument,
                "SIMD backend '" + std::string(backend_name(backend)) +
                    "' is not available on this machine");
  }
  active_slot().store(&table_for(backend), std::memory_order_release);
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

Backend parse_backend(std::string_view name) {
  if (name == "auto") return best_backend();
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  throw Error(Errc::kInvalidArgument,
              "unknown SIMD backend '" + std::string(name) + "'");
}

}  // namespace langid::simd
