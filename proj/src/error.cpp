#include "walker/error.hpp"

#include <iostream>

namespace walker {

namespace {

void stderr_sink(std::string_view message) { std::cerr << "warning: " << message << '\n'; }

WarningSink g_sink = &stderr_sink;

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownMaterial: return "UnknownMaterial";
    case ErrorCode::InvalidSection: return "InvalidSection";
    case ErrorCode::InfeasibleDesign: return "InfeasibleDesign";
    case ErrorCode::InvalidSampleRequest: return "InvalidSampleRequest";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::MeshError: return "MeshError";
    case ErrorCode::MechanismDetected: return "MechanismDetected";
    case ErrorCode::SimulationFailure: return "SimulationFailure";
    case ErrorCode::InvalidStabilityInput: return "InvalidStabilityInput";
    case ErrorCode::IncompleteRecord: return "IncompleteRecord";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EncodingError: return "EncodingError";
    case ErrorCode::NoCounterfactualsFound: return "NoCounterfactualsFound";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void set_warning_sink(WarningSink sink) { g_sink = sink ? sink : &stderr_sink; }

void warn(std::string_view message) { g_sink(message); }

}  // namespace walker
