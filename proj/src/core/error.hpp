#pragma once

#include <stdexcept>
#include <string>

namespace folia {

enum class ErrorCode {
  InvalidInput,
  EmptySet,
  DimMismatch,
  Unsupported,
  InversionFailure,
  NotInvariant,
  SupportOverlap,
  NotInvertible,
  ShadowNotFound,
  LeafReturnFailed,
  EmptyImage,
  MissingSample,
  ConfigError,
  VerificationFailed,
  Timeout,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace folia
