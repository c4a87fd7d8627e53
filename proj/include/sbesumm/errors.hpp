#pragma once

#include <stdexcept>

namespace sbesumm {

// Base type for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyInput : Error { using Error::Error; };
struct EmptyCorpus : Error { using Error::Error; };
struct BadParams : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct DegenerateColumn : Error { using Error::Error; };
struct CalibrationFailed : Error { using Error::Error; };
struct BadReference : Error { using Error::Error; };
struct InputFormatError : Error { using Error::Error; };

// Two-party session errors.
struct TransportError : Error { using Error::Error; };
struct ProtocolMismatch : Error { using Error::Error; };
struct ProtocolViolation : Error { using Error::Error; };

}  // namespace sbesumm
