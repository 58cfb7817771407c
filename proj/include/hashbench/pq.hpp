#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hashbench/container.hpp"
#include "hashbench/types.hpp"

namespace hashbench {

struct PqTrainParams {
  std::size_t m = 8;     // subquantizers
  std::size_t ks = 256;  // centroids per subquantizer
  std::uint64_t seed = 0;
  std::size_t max_iter = 50;
  double tolerance = 1e-5;
  /// Training rows are subsampled (seeded) above this count; 0 keeps all.
  std::size_t max_train_points = 0;
};

struct PqCode {
  std::vector<std::uint16_t> indices;
  friend bool operator==(const PqCode&, const PqCode&) = default;
};

/// N codes of M indices each, row-major.
struct PqCodeMatrix {
  std::size_t count = 0;
  std::size_t m = 0;
  std::vector<std::uint16_t> data;

  std::span<const std::uint16_t> row(std::size_t i) const noexcept {
    return {data.data() + i * m, m};
  }
};

/// Product quantizer: the (zero-padded) input is cut into M equal contiguous
/// subspaces, each quantized by its own k-means codebook.
class PqCodebook {
 public:
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t padded_dim() const noexcept { return dsub_ * m_; }
  std::size_t padding() const noexcept { return padded_dim() - input_dim_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t ks() const noexcept { return ks_; }
  std::size_t dsub() const noexcept { return dsub_; }
  std::uint64_t seed() const noexcept { return seed_; }
  /// M * ceil(log2 ks); 8M at ks = 256.
  std::size_t code_size_bits() const noexcept;
  /// Mean squared reconstruction error over the training rows.
  double training_error() const noexcept { return training_error_; }

  /// Centroid c of subspace j (dsub floats).
  std::span<const float> centroid(std::size_t j, std::size_t c) const noexcept {
    return {centroids_.data() + (j * ks_ + c) * dsub_, dsub_};
  }

  PqCode encode(std::span<const float> x) const;
  PqCodeMatrix encode_rows(const FeatureMatrix& x) const;
  /// Throws CorruptionError on an out-of-range index.
  std::vector<float> decode(const PqCode& code) const;
  FeatureMatrix decode_rows(const PqCodeMatrix& codes) const;

  /// M x ks squared distances from the query subvectors to every centroid.
  std::vector<double> distance_table(std::span<const float> query) const;
  /// ||query - decode(code)||^2 through the lookup table.
  double asymmetric_distance(std::span<const float> query, const PqCode& code) const;

  Container to_container() const;
  static PqCodebook from_container(const Container& c);

  friend PqCodebook pq_train(const FeatureMatrix& data, const PqTrainParams& params);
  friend bool operator==(const PqCodebook&, const PqCodebook&) = default;

 private:
  std::vector<float> padded(std::span<const float> x) const;
  void check_code(std::span<const std::uint16_t> code) const;

  std::size_t input_dim_ = 0;
  std::size_t m_ = 0;
  std::size_t ks_ = 0;
  std::size_t dsub_ = 0;
  std::uint64_t seed_ = 0;
  double training_error_ = 0.0;
  std::vector<float> centroids_;  // M x ks x dsub
};

/// Indices stored as little-endian u16.
Container pq_codes_container(const PqCodeMatrix& codes);
PqCodeMatrix pq_codes_from_container(const Container& c);

/// Throws InsufficientDataError when N < ks, ConfigError for M > d or
/// ks outside [1, 65536].
PqCodebook pq_train(const FeatureMatrix& data, const PqTrainParams& params);

}  // namespace hashbench
