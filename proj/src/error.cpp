#include "langid/error.hpp"

namespace langid {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kMalformedLabel: return "malformed-code";
    case Errc::kUnknownScript: return "unknown-script";
    case Errc::kEmptyCorpus: return "empty-corpus";
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kIo: return "io";
    case Errc::kFormat: return "format";
    case Errc::kVersionMismatch: return "version-mismatch";
    case Errc::kChecksum: return "checksum";
    case Errc::kSingleLabel: return "single-label";
    case Errc::kEmptyFeatures: return "empty-features";
    case Errc::kUnknownLabel: return "unknown-label";
    case Errc::kLengthMismatch: return "length-mismatch";
    case Errc::kEmptyResult: return "empty-result";
    case Errc::kUnmappedLabel: return "unmapped-label";
    case Errc::kDegenerateVariance: return "degenerate-variance";
  }
  return "unknown";
}

}  // namespace langid
