#pragma once

#include <cstdint>
#include <string_view>

namespace langid {

inline constexpr uint32_t kFnvOffsetBasis = 2166136261u;
inline constexpr uint32_t kFnvPrime = 16777619u;

/// 32-bit FNV-1a over the raw bytes of `data`.
constexpr uint32_t fnv1a_32(std::string_view data) noexcept {
  uint32_t h = kFnvOffsetBasis;
  for (char c : data) {
    h ^= static_cast<uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace langid
