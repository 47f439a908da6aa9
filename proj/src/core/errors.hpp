#pragma once

#include <stdexcept>
#include <string>

namespace tracecvx {

// Numeric values are part of the C ABI (see tracecvx.h); append only.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kSchema = 2,
  kNonHermitianInput = 3,
  kNotPsd = 4,
  kSingularPower = 5,
  kDimMismatch = 6,
  kBadFactorIndex = 7,
  kNotBipartite = 8,
  kNotTripartite = 9,
  kNotADensityMatrix = 10,
  kBadRegime = 11,
  kGroupTooLarge = 12,
  kSearchExhausted = 13,
  kNotAContraction = 14,
  kSingularCore = 15,
  kSingularProbe = 16,
  kIo = 17,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tracecvx
