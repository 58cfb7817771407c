#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hashbench/container.hpp"
#include "hashbench/types.hpp"

namespace hashbench {

// ---- one-hot class codes -------------------------------------------------

struct OneHotCode {
  Label class_index = 0;
  std::size_t num_classes = 0;
};

/// ceil(log2 C) bits, the storage cost of a class index.
std::size_t onehot_code_bits(std::size_t num_classes);

/// Argmax of the posterior, lowest index on ties.
OneHotCode onehot_encode(std::span<const double> probs);

/// Class indices packed on onehot_code_bits(C) bits each, LSB first.
Container onehot_codes_container(std::span<const Label> classes, std::size_t num_classes);
LabelVector onehot_codes_from_container(const Container& c);

// ---- binary codes ----------------------------------------------------------

/// Fixed-length bit string. Bit i lives in bit (i mod 8) of byte (i div 8).
class BinaryCode {
 public:
  BinaryCode() = default;
  explicit BinaryCode(std::size_t bits) : bits_(bits), bytes_((bits + 7) / 8, 0) {}

  std::size_t size() const noexcept { return bits_; }
  bool bit(std::size_t i) const noexcept { return (bytes_[i >> 3] >> (i & 7)) & 1u; }
  void set(std::size_t i, bool on) noexcept {
    const auto mask = static_cast<std::uint8_t>(1u << (i & 7));
    bytes_[i >> 3] = on ? (bytes_[i >> 3] | mask) : (bytes_[i >> 3] & ~mask);
  }
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  static BinaryCode from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits);

  friend bool operator==(const BinaryCode&, const BinaryCode&) = default;

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint8_t> bytes_;
};

std::size_t hamming_distance(const BinaryCode& a, const BinaryCode& b);

/// N packed codes of equal length, row-major.
struct BinaryCodeMatrix {
  std::size_t count = 0;
  std::size_t bits = 0;
  std::vector<std::uint8_t> data;

  std::size_t code_bytes() const noexcept { return (bits + 7) / 8; }
  std::span<const std::uint8_t> row(std::size_t i) const noexcept {
    return {data.data() + i * code_bytes(), code_bytes()};
  }
};

// ---- LSH with tight frames -------------------------------------------------

/// b x d projection. For b >= d the columns satisfy A^T A = (b/d) I_d, for
/// b < d the rows are orthonormal (A A^T = I_b). Codes are sign bits of
/// A (x - center).
class TightFrame {
 public:
  /// Deterministic in `seed`. Verifies the frame identity to 1e-6.
  static TightFrame create(std::size_t input_dim, std::size_t bits, std::uint64_t seed);

  std::size_t bits() const noexcept { return bits_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const Matrix<double>& matrix() const noexcept { return matrix_; }
  const std::optional<std::vector<double>>& center() const noexcept { return center_; }
  std::size_t code_size_bits() const noexcept { return bits_; }

  /// Subtracted from every input before projection.
  void set_center(std::vector<double> center);

  /// Max-abs deviation from the frame identity for this (b, d) regime.
  double identity_residual() const;

  Container to_container() const;
  /// Float32 round-tripping loosens the identity; it is re-checked to 1e-4
  /// relative to b/d.
  static TightFrame from_container(const Container& c);

  friend bool operator==(const TightFrame&, const TightFrame&) = default;

 private:
  std::size_t input_dim_ = 0;
  std::size_t bits_ = 0;
  std::uint64_t seed_ = 0;
  Matrix<double> matrix_;
  std::optional<std::vector<double>> center_;
};

/// bit i = 1 iff (A (x - center))_i >= 0.
BinaryCode lsh_encode(const TightFrame& frame, std::span<const double> x);
BinaryCode lsh_encode(const TightFrame& frame, std::span<const float> x);

/// Encodes every row into a packed matrix.
BinaryCodeMatrix lsh_encode_rows(const TightFrame& frame, const Matrix<double>& rows);
BinaryCodeMatrix lsh_encode_rows(const TightFrame& frame, const FeatureMatrix& rows);

Container binary_codes_container(const BinaryCodeMatrix& codes);
BinaryCodeMatrix binary_codes_from_container(const Container& c);

}  // namespace hashbench
