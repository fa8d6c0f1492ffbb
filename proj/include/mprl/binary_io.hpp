#ifndef MPRL_BINARY_IO_HPP_
#define MPRL_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "mprl/error.hpp"

// Little-endian primitives shared by the basis-set and checkpoint formats.
namespace mprl::io {

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void bytes(std::string_view s) {
    for (char c : s) put_byte(static_cast<std::uint8_t>(c));
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) put_byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void string(std::string_view s) {
    u64(s.size());
    bytes(s);
  }

  template <typename Derived>
  void matrix_rowmajor(const Eigen::DenseBase<Derived>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
  }

  void vector_with_size(const Eigen::VectorXd& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }

  std::uint64_t checksum() const { return hash_; }

 private:
  void put_byte(std::uint8_t b) {
    out_.put(static_cast<char>(b));
    hash_ = (hash_ ^ b) * 0x100000001b3ULL;
  }

  std::ostream& out_;
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;  // FNV-1a
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    for (auto& c : s) c = static_cast<char>(get_byte());
    return s;
  }

  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(get_byte()) << (8 * i);
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string string(std::size_t max_len = 1 << 24) {
    const auto n = u64();
    if (n > max_len) fail("string length out of range");
    return bytes(static_cast<std::size_t>(n));
  }

  Eigen::MatrixXd matrix_rowmajor(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f64();
    return m;
  }

  Eigen::VectorXd vector_with_size(std::uint64_t max_len = 1ULL << 28) {
    const auto n = u64();
    if (n > max_len) fail("vector length out of range");
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f64();
    return v;
  }

  std::uint64_t checksum() const { return hash_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw FormatError(what_ + ": " + message);
  }

 private:
  std::uint8_t get_byte() {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) fail("unexpected end of file");
    const auto b = static_cast<std::uint8_t>(c);
    hash_ = (hash_ ^ b) * 0x100000001b3ULL;
    return b;
  }

  std::istream& in_;
  std::string what_;
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace mprl::io

#endif  // MPRL_BINARY_IO_HPP_
