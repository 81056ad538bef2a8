#include "wearfuse/error.hpp"

namespace wearfuse {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::StreamTooShort: return "StreamTooShort";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::SpectrumTooShort: return "SpectrumTooShort";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::InvalidXi: return "InvalidXi";
    case ErrorCode::TooManyModes: return "TooManyModes";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyTeam: return "EmptyTeam";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::SizeOutOfRange: return "SizeOutOfRange";
    case ErrorCode::MissingModality: return "MissingModality";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::Ingestion: return "Ingestion";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace wearfuse
