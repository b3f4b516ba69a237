#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace walker {

enum class ErrorCode {
  UnknownMaterial,
  InvalidSection,
  InfeasibleDesign,
  InvalidSampleRequest,
  DimensionMismatch,
  EmptyBatch,
  MeshError,
  MechanismDetected,
  SimulationFailure,
  InvalidStabilityInput,
  IncompleteRecord,
  InsufficientData,
  EncodingError,
  NoCounterfactualsFound,
  InvalidQuery,
  InvalidConfig,
  IoError,
  FormatError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal diagnostics (zero-range features, clamped k, constant targets).
// Defaults to stderr; tests may silence it.
using WarningSink = void (*)(std::string_view);
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace walker
