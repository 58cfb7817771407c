#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hashbench {

struct KMeansParams {
  std::size_t k = 256;
  std::uint64_t seed = 0;
  std::size_t max_iter = 50;
  /// Stop when (previous - current) / previous falls below this.
  double tolerance = 1e-5;
};

struct KMeansResult {
  std::size_t dim = 0;
  std::vector<float> centroids;          // k x dim
  std::vector<std::uint32_t> assignment;  // per point
  /// Sum of squared distances to the assigned centroid, one entry per
  /// accepted iteration; non-increasing.
  std::vector<double> objective;
};

/// Lloyd iterations from k-means++ seeding. Empty clusters are reseeded with
/// the point farthest from its centroid. Assignment runs in parallel,
/// centroid sums accumulate in point order, so results depend only on
/// (data, params). Throws InsufficientDataError when n < k.
KMeansResult kmeans(const float* data, std::size_t n, std::size_t dim, const KMeansParams& params);

}  // namespace hashbench
