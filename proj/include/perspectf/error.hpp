// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace perspectf {

enum class ErrorKind {
  NonDivisibleHop,
  NotPainless,
  IncompleteCover,
  AliasedModulation,
  ComplexWindow,
  LengthMismatch,
  ShapeMismatch,
  PreconditionViolated,
  NonPositiveStep,
  InvalidPenalty,
  ParamsInvalid,
  StepSizeViolation,
  NonPositiveWeights,
  CGNoConvergence,
  DegenerateReference,
  ZeroVector,
  AboveNyquist,
  UnsupportedFormat,
  EmptyFile,
  IoError,
  SidecarMismatch,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonDivisibleHop: return "NonDivisibleHop";
    case ErrorKind::NotPainless: return "NotPainless";
    case ErrorKind::IncompleteCover: return "IncompleteCover";
    case ErrorKind::AliasedModulation: return "AliasedModulation";
    case ErrorKind::ComplexWindow: return "ComplexWindow";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::NonPositiveStep: return "NonPositiveStep";
    case ErrorKind::InvalidPenalty: return "InvalidPenalty";
    case ErrorKind::ParamsInvalid: return "ParamsInvalid";
    case ErrorKind::StepSizeViolation: return "StepSizeViolation";
    case ErrorKind::NonPositiveWeights: return "NonPositiveWeights";
    case ErrorKind::CGNoConvergence: return "CGNoConvergence";
    case ErrorKind::DegenerateReference: return "DegenerateReference";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::AboveNyquist: return "AboveNyquist";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SidecarMismatch: return "SidecarMismatch";
  }
  return "Unknown";
}

/// Library exception; `kind()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace perspectf
