#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace walker {

namespace detail {
struct SobolPrimitive {
  std::uint32_t poly;  // primitive polynomial, leading and trailing 1 bits included
  std::uint32_t m[18]; // initial direction numbers
};
extern const SobolPrimitive kSobolTable[];
}  // namespace detail

inline constexpr int kSobolMaxDimension = 21201;

/// Unscrambled Sobol points (Joe-Kuo direction numbers, Gray-code order) as an
/// n x dim matrix in [0, 1). Row i is sequence index skip + i; index 0 is the
/// origin. Throws Error(InvalidSampleRequest) for dim outside [1, 21201],
/// n < 1, or an index range beyond 2^32.
Eigen::MatrixXd sobol_points(int dim, std::int64_t n, std::int64_t skip = 0);

}  // namespace walker
