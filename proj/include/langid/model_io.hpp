#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "langid/model.hpp"

namespace langid {

inline constexpr std::string_view kModelMagic = "LIDM";
inline constexpr uint16_t kModelFormatVersion = 1;

/// Binary model image:
///   "LIDM" | u16 version | hyperparams | labels | vocabulary |
///   input matrix | output matrix | u32 CRC-32 of every preceding byte
/// Integers and IEEE-754 floats are little-endian; strings are u32 length
/// followed by UTF-8 bytes.
std::string serialize_model(const Model& model);

/// Rejects images with the wrong magic (kFormat), an unknown version
/// (kVersionMismatch) or a bad/truncated payload (kChecksum).
Model deserialize_model(std::string_view bytes);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace langid
