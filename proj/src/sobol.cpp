#include "walker/sobol.hpp"

#include <array>
#include <bit>
#include <string>
#include <vector>

#include "walker/error.hpp"

namespace walker {

namespace {

constexpr int kBits = 32;
constexpr double kScale = 1.0 / 4294967296.0;  // 2^-32

using Directions = std::array<std::uint32_t, kBits>;

Directions direction_numbers(int dimension) {
  Directions v{};
  if (dimension == 0) {
    for (int i = 0; i < kBits; ++i) v[i] = 1u << (kBits - 1 - i);
    return v;
  }
  const detail::SobolPrimitive& p = detail::kSobolTable[dimension];
  const int degree = std::bit_width(p.poly) - 1;
  const std::uint32_t a = (p.poly >> 1) & ((1u << (degree - 1)) - 1u);
  for (int i = 0; i < degree && i < kBits; ++i) v[i] = p.m[i] << (kBits - 1 - i);
  for (int i = degree; i < kBits; ++i) {
    std::uint32_t value = v[i - degree] ^ (v[i - degree] >> degree);
    for (int k = 1; k < degree; ++k) {
      if ((a >> (degree - 1 - k)) & 1u) value ^= v[i - k];
    }
    v[i] = value;
  }
  return v;
}

}  // namespace

Eigen::MatrixXd sobol_points(int dim, std::int64_t n, std::int64_t skip) {
  if (dim < 1 || dim > kSobolMaxDimension) {
    throw Error(ErrorCode::InvalidSampleRequest, "Sobol dimension " + std::to_string(dim) +
                                                     " outside [1, " + std::to_string(kSobolMaxDimension) + "]");
  }
  if (n < 1) throw Error(ErrorCode::InvalidSampleRequest, "Sobol point count must be >= 1");
  if (skip < 0 || skip + n > (std::int64_t{1} << kBits)) {
    throw Error(ErrorCode::InvalidSampleRequest, "Sobol index range exceeds 2^32");
  }

  std::vector<Directions> v(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) v[j] = direction_numbers(j);

  // State at index `skip` is the XOR of the directions selected by gray(skip).
  std::vector<std::uint32_t> x(static_cast<std::size_t>(dim), 0u);
  const std::uint64_t gray = static_cast<std::uint64_t>(skip) ^ (static_cast<std::uint64_t>(skip) >> 1);
  for (int bit = 0; bit < kBits; ++bit) {
    if ((gray >> bit) & 1u) {
      for (int j = 0; j < dim; ++j) x[j] ^= v[j][bit];
    }
  }

  Eigen::MatrixXd out(n, dim);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) out(i, j) = x[j] * kScale;
    const std::uint64_t index = static_cast<std::uint64_t>(skip + i);
    const int c = std::countr_one(index);
    if (c < kBits) {
      for (int j = 0; j < dim; ++j) x[j] ^= v[j][c];
    }
  }
  return out;
}

}  // namespace walker
