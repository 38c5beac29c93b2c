#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpclo {

enum class ErrorCode {
  kDimensionMismatch,
  kNotPositiveDefinite,
  kNoConvergence,
  kSingular,
  kRankDeficient,
  kNotInterior,
  kOutsideDomain,
  kBoundaryUndefined,
  kNotAProjection,
  kParse,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Single exception type for contract violations; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mpclo
