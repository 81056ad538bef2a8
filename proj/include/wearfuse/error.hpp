#pragma once

#include <stdexcept>
#include <string>

namespace wearfuse {

enum class ErrorCode {
  InvalidArgument,
  InvalidSpec,
  StreamTooShort,
  EmptyRange,
  NonFiniteInput,
  OrderOutOfRange,
  SpectrumTooShort,
  DegenerateInput,
  InvalidXi,
  TooManyModes,
  InsufficientData,
  DimensionMismatch,
  EmptyInput,
  EmptyTeam,
  InvalidDistribution,
  SizeOutOfRange,
  MissingModality,
  Validation,
  Ingestion,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; the code drives C API status mapping.
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

}  // namespace wearfuse
