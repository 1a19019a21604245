#pragma once

#include <stdexcept>
#include <string>

namespace thermohand {

// Failure classes surfaced by the core. The C API maps each one to a
// distinct status code, so keep the two lists in sync.
enum class ErrorCode {
  InvalidArgument = 1,
  MissingFile,
  MalformedHeader,
  DepthMismatch,
  DimensionMismatch,
  Degenerate,
  Singular,
  EmptySelection,
  InsufficientData,
  RegionExtraction,
  Parse,
  Io,
};

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

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

} // namespace thermohand
