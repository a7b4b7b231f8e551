#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "langid/simd.hpp"
#include "test_util.hpp"

namespace simd = langid::simd;

namespace {

std::vector<const simd::Kernels*> backends() {
  std::vector<const simd::Kernels*> out{&simd::scalar_kernels()};
  if (simd::available(simd::Backend::kAvx2)) out.push_back(simd::avx2_kernels());
  return out;
}

std::vector<float> random_vector(std::mt19937& rng, size_t n) {
  std::uniform_real_distribution<float> d(-2.0f, 2.0f);
  std::vector<float> v(n);
  for (float& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("every available backend agrees with the scalar reference") {
  std::mt19937 rng(31);
  const auto& ref = simd::scalar_kernels();
  for (const auto* k : backends()) {
    CAPTURE(k->name);
    for (size_t n = 0; n <= 70; ++n) {
      for (int rep = 0; rep < 5; ++rep) {
        const auto a = random_vector(rng, n);
        const auto b = random_vector(rng, n);
        double magnitude = 0.0;
        double exact = 0.0;
        for (size_t i = 0; i < n; ++i) {
          magnitude += std::abs(static_cast<double>(a[i]) * b[i]);
          exact += static_cast<double>(a[i]) * b[i];
        }
        const double tol = (n + 1) * std::numeric_limits<float>::epsilon() * (magnitude + 1e-30);
        CHECK(std::abs(k->dot(a, b) - exact) <= tol);
        CHECK(std::abs(k->dot(a, b) - ref.dot(a, b)) <= 2 * tol);

        const float alpha = std::uniform_real_distribution<float>(-1.5f, 1.5f)(rng);
        auto y1 = b;
        auto y2 = b;
        k->axpy(alpha, a, y1);
        ref.axpy(alpha, a, y2);
        for (size_t i = 0; i < n; ++i) {
          const double scale_i = std::abs(alpha * a[i]) + std::abs(b[i]);
          CHECK(std::abs(y1[i] - y2[i]) <= 2 * std::numeric_limits<float>::epsilon() * scale_i);
        }

        auto s1 = a;
        auto s2 = a;
        k->scale(alpha, s1);
        ref.scale(alpha, s2);
        CHECK(s1 == s2);  // one IEEE multiply per element in both

        if (n > 0) CHECK(k->max(a) == ref.max(a));
      }
    }
  }
}

TEST_CASE("kernels leave memory past the span untouched") {
  for (const auto* k : backends()) {
    CAPTURE(k->name);
    for (size_t n : {1u, 7u, 8u, 9u, 17u}) {
      std::vector<float> x(n, 1.0f);
      std::vector<float> y(n + 8, 5.0f);
      k->axpy(2.0f, x, std::span<float>(y.data(), n));
      for (size_t i = 0; i < n; ++i) CHECK(y[i] == 7.0f);
      for (size_t i = n; i < n + 8; ++i) CHECK(y[i] == 5.0f);
      k->scale(3.0f, std::span<float>(y.data(), n));
      for (size_t i = n; i < n + 8; ++i) CHECK(y[i] == 5.0f);
    }
  }
}

TEST_CASE("backend selection") {
  CHECK(simd::available(simd::Backend::kScalar));
  CHECK(simd::parse_backend("scalar") == simd::Backend::kScalar);
  CHECK(simd::parse_backend("auto") == simd::best_backend());
  CHECK(test::error_code([] { simd::parse_backend("sse9"); }) ==
        langid::Errc::kInvalidArgument);

  const auto previous = simd::active().backend;
  simd::set_backend(simd::Backend::kScalar);
  CHECK(simd::active().backend == simd::Backend::kScalar);
  if (simd::available(simd::Backend::kAvx2)) {
    simd::set_backend(simd::Backend::kAvx2);
    CHECK(std::string(simd::active().name) == "avx2");
  } else {
    CHECK(test::error_code([] { simd::set_backend(simd::Backend::kAvx2); }) ==
          langid::Errc::kInvalidArgument);
  }
  simd::set_backend(previous);
}
