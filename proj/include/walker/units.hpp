#pragma once

// Conversion boundary between the imperial units used in every file and
// command line, and the SI units used internally.

namespace walker::units {

inline constexpr double kMetersPerInch = 0.0254;
inline constexpr double kNewtonsPerPoundForce = 4.4482216152605;
inline constexpr double kKilogramsPerPound = 0.45359237;
inline constexpr double kStandardGravity = 9.80665;
inline constexpr double kPi = 3.14159265358979323846;

template <typename Scalar>
constexpr Scalar inches_to_meters(Scalar in) { return in * Scalar(kMetersPerInch); }
template <typename Scalar>
constexpr Scalar meters_to_inches(Scalar m) { return m / Scalar(kMetersPerInch); }

template <typename Scalar>
constexpr Scalar lbf_to_newtons(Scalar f) { return f * Scalar(kNewtonsPerPoundForce); }
template <typename Scalar>
constexpr Scalar newtons_to_lbf(Scalar f) { return f / Scalar(kNewtonsPerPoundForce); }

template <typename Scalar>
constexpr Scalar pounds_to_kilograms(Scalar m) { return m * Scalar(kKilogramsPerPound); }
template <typename Scalar>
constexpr Scalar kilograms_to_pounds(Scalar m) { return m / Scalar(kKilogramsPerPound); }

template <typename Scalar>
constexpr Scalar degrees_to_radians(Scalar deg) { return deg * Scalar(kPi) / Scalar(180); }
template <typename Scalar>
constexpr Scalar radians_to_degrees(Scalar rad) { return rad * Scalar(180) / Scalar(kPi); }

}  // namespace walker::units
