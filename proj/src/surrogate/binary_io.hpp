#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "walker/error.hpp"

namespace walker::surrogate {

// Little-endian host assumed; archives are not meant to cross architectures.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  template <typename T>
  void pod(const T& v) { os_.write(reinterpret_cast<const char*>(&v), sizeof(T)); }

  void f64(double v) { pod(v); }
  void i64(std::int64_t v) { pod(v); }
  void u64(std::uint64_t v) { pod(v); }

  void string(const std::string& s) {
    u64(s.size());
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  template <typename Derived>
  void matrix(const Eigen::DenseBase<Derived>& m) {
    i64(m.rows());
    i64(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) f64(m(i, j));
  }

  template <typename T>
  void vector(const std::vector<T>& v) {
    u64(v.size());
    if (!v.empty()) os_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
  }

 private:
  std::ostream& os_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& is) : is_(is) {}

  template <typename T>
  T pod() {
    T v{};
    is_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is_) throw Error(ErrorCode::FormatError, "truncated model archive");
    return v;
  }

  double f64() { return pod<double>(); }
  std::int64_t i64() { return pod<std::int64_t>(); }
  std::uint64_t u64() { return pod<std::uint64_t>(); }

  std::string string() {
    const std::uint64_t n = bounded(u64());
    std::string s(n, '\0');
    is_.read(s.data(), static_cast<std::streamsize>(n));
    if (!is_) throw Error(ErrorCode::FormatError, "truncated model archive");
    return s;
  }

  Eigen::MatrixXd matrix() {
    const auto rows = static_cast<Eigen::Index>(bounded(static_cast<std::uint64_t>(i64())));
    const auto cols = static_cast<Eigen::Index>(bounded(static_cast<std::uint64_t>(i64())));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = f64();
    return m;
  }

  template <typename T>
  std::vector<T> vector() {
    const std::uint64_t n = bounded(u64());
    std::vector<T> v(n);
    if (n) is_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    if (!is_) throw Error(ErrorCode::FormatError, "truncated model archive");
    return v;
  }

 private:
  static std::uint64_t bounded(std::uint64_t n) {
    if (n > (std::uint64_t{1} << 32)) throw Error(ErrorCode::FormatError, "corrupt model archive");
    return n;
  }

  std::istream& is_;
};

}  // namespace walker::surrogate
