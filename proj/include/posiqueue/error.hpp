#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posiqueue {

/// Machine-readable failure categories. The service maps these onto HTTP
/// statuses and the CLI onto exit codes.
enum class ErrorCode {
  invalid_argument,
  parse_error,
  referential_integrity,
  not_found,
  wrong_kind,
  duplicate,
  capacity,
  already_voted,
  not_highlighted,
  invalid_flair,
  empty_reason,
  insufficient_data,
  stratification,
  degenerate_training,
  undefined_auc,
  shape_mismatch,
  corrupt_log,
  io_error,
};

inline constexpr std::string_view to_token(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::referential_integrity: return "referential_integrity";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::wrong_kind: return "wrong_kind";
    case ErrorCode::duplicate: return "duplicate";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::already_voted: return "already_voted";
    case ErrorCode::not_highlighted: return "not_highlighted";
    case ErrorCode::invalid_flair: return "invalid_flair";
    case ErrorCode::empty_reason: return "empty_reason";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::stratification: return "stratification";
    case ErrorCode::degenerate_training: return "degenerate_training";
    case ErrorCode::undefined_auc: return "undefined_auc";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::corrupt_log: return "corrupt_log";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace posiqueue
