#pragma once

#include <stdexcept>
#include <string>

namespace floorgen {

enum class ErrorKind {
  FileNotFound,
  ParseError,
  UnsupportedFormat,
  EmptyCloud,
  TooFewPoints,
  NonPositiveBinSize,
  NoPeaksFound,
  FrameMismatch,
  LengthMismatch,
  OutOfRangeLabel,
  DegenerateWall,
  InvalidSpec,
  InvalidConfig,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // Input/usage errors map to CLI exit code 2, everything else to 3.
  bool is_input_error() const {
    switch (kind_) {
      case ErrorKind::FileNotFound:
      case ErrorKind::ParseError:
      case ErrorKind::UnsupportedFormat:
      case ErrorKind::LengthMismatch:
      case ErrorKind::OutOfRangeLabel:
      case ErrorKind::InvalidSpec:
      case ErrorKind::InvalidConfig:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace floorgen
