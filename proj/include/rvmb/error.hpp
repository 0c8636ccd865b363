#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rvmb {

enum class ErrorCode {
  // isa / execution
  IllegalInstruction,
  UnalignedAccess,
  OutOfBoundsAccess,
  LimitExceeded,
  UnsupportedSyscall,
  Breakpoint,
  // loader
  BadMagic,
  WrongClass,
  WrongMachine,
  UnsupportedType,
  OverlappingSegments,
  UnknownMnemonic,
  UndefinedLabel,
  ImmediateOutOfRange,
  SyntaxError,
  // metrics
  ZeroInstructions,
  MismatchedRuns,
  // tensorc
  ShapeMismatch,
  UnsupportedOp,
  CapacityExceeded,
  ParseError,
  // harness
  InvalidConfig,
  CompileFailure,
  EmptyInput,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IllegalInstruction: return "IllegalInstruction";
    case ErrorCode::UnalignedAccess: return "UnalignedAccess";
    case ErrorCode::OutOfBoundsAccess: return "OutOfBoundsAccess";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::UnsupportedSyscall: return "UnsupportedSyscall";
    case ErrorCode::Breakpoint: return "Breakpoint";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::WrongClass: return "WrongClass";
    case ErrorCode::WrongMachine: return "WrongMachine";
    case ErrorCode::UnsupportedType: return "UnsupportedType";
    case ErrorCode::OverlappingSegments: return "OverlappingSegments";
    case ErrorCode::UnknownMnemonic: return "UnknownMnemonic";
    case ErrorCode::UndefinedLabel: return "UndefinedLabel";
    case ErrorCode::ImmediateOutOfRange: return "ImmediateOutOfRange";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ZeroInstructions: return "ZeroInstructions";
    case ErrorCode::MismatchedRuns: return "MismatchedRuns";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnsupportedOp: return "UnsupportedOp";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::CompileFailure: return "CompileFailure";
    case ErrorCode::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

/// Every failure raised by the library. `pc()` is set for faults that
/// happen while executing guest code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<uint64_t> pc = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message), pc_(pc) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }
  std::optional<uint64_t> pc() const noexcept { return pc_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<uint64_t> pc_;
};

}  // namespace rvmb
