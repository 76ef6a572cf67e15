#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace camscout {

enum class ErrorKind {
  MalformedUrl,
  UnparseablePayload,
  SeedUnreachable,
  FetchTimeout,
  FetchFailed,
  AllSamplesFailed,
  DecodeError,
  DimensionMismatch,
  EmptyImage,
  InsufficientFrames,
  Unclassifiable,
  StreamUnreachable,
  PlaylistMalformed,
  LengthMismatch,
  EmptyInput,
  NoValidPoint,
  NotFound,
  ConflictingLabel,
  LabelRejected,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library reports carries a kind so callers can branch on
// it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace camscout
