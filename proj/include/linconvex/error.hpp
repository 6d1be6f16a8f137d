#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace linconvex {

enum class ErrorCode {
  DimMismatch,
  GridMismatch,
  DegenerateParams,
  EmptyThroughSet,
  PlaneNotInPencil,
  NearSingular,
  EmptyGrid,
  NotConnected,
  NotClosed,
  BoxTooSmall,
  IndexOutOfRange,
  ReplayMismatch,
  InvalidArgument,
  IoError,
  ParseError,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library. what() is "<CodeName>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DegenerateParams: return "DegenerateParams";
    case ErrorCode::EmptyThroughSet: return "EmptyThroughSet";
    case ErrorCode::PlaneNotInPencil: return "PlaneNotInPencil";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace linconvex
