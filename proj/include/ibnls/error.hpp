#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ibnls {

enum class ErrorKind {
  ConfigInvalid,
  OrderUnsupported,
  RegionEmpty,
  ZeroField,
  NonFiniteField,
  KTooSmall,
  BridgeMonotonicityFailed,
  PropertyViolated,
  DominanceFailed,
  CaseDimensionMismatch,
  NonPositiveInput,
  InsufficientData,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::OrderUnsupported: return "OrderUnsupported";
    case ErrorKind::RegionEmpty: return "RegionEmpty";
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::NonFiniteField: return "NonFiniteField";
    case ErrorKind::KTooSmall: return "KTooSmall";
    case ErrorKind::BridgeMonotonicityFailed: return "BridgeMonotonicityFailed";
    case ErrorKind::PropertyViolated: return "PropertyViolated";
    case ErrorKind::DominanceFailed: return "DominanceFailed";
    case ErrorKind::CaseDimensionMismatch: return "CaseDimensionMismatch";
    case ErrorKind::NonPositiveInput: return "NonPositiveInput";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ibnls
