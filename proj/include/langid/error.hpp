#pragma once

#include <stdexcept>
#include <string>

namespace langid {

enum class Errc {
  kMalformedLabel,
  kUnknownScript,
  kEmptyCorpus,
  kInvalidArgument,
  kIo,
  kFormat,
  kVersionMismatch,
  kChecksum,
  kSingleLabel,
  kEmptyFeatures,
  kUnknownLabel,
  kLengthMismatch,
  kEmptyResult,
  kUnmappedLabel,
  kDegenerateVariance,
};

const char* errc_name(Errc code) noexcept;

// Every failure the library reports carries one of the codes above so that
// callers (the CLI in particular) can branch on the kind without parsing text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace langid
