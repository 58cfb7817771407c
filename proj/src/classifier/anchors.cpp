#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hashbench/classifier.hpp"
#include "hashbench/kernels.hpp"
#include "hashbench/random.hpp"

namespace hashbench {

GaussianAnchorMap::GaussianAnchorMap(FeatureMatrix anchors, double sigma, std::uint64_t seed)
    : anchors_(std::move(anchors)), sigma_(sigma), seed_(seed) {
  if (anchors_.rows() == 0) throw ConfigError("anchor map needs h >= 1");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw DegenerateError("anchor bandwidth sigma must be positive, got " +
                          std::to_string(sigma_));
  }
}

std::vector<double> GaussianAnchorMap::apply(std::span<const float> x) const {
  if (x.size() != input_dim()) throw ShapeError("anchor map: input dimension mismatch");
  FeatureMatrix one(1, x.size(), std::vector<float>(x.begin(), x.end()));
  Matrix<double> out;
  kernels::serial::gaussian_features(one, anchors_, sigma_, out);
  return {out.values().begin(), out.values().end()};
}

Matrix<double> GaussianAnchorMap::apply_rows(const FeatureMatrix& x) const {
  if (x.cols() != input_dim()) throw ShapeError("anchor map: input dimension mismatch");
  Matrix<double> out;
  kernels::gaussian_features(x, anchors_, sigma_, out);
  return out;
}

Container GaussianAnchorMap::to_container() const {
  Container c;
  c.kind = ContainerKind::kAnchorMap;
  c.dims = {static_cast<std::uint32_t>(size()), static_cast<std::uint32_t>(input_dim())};
  c.seed = static_cast<std::uint32_t>(seed_);
  c.floats.assign(anchors_.values().begin(), anchors_.values().end());
  c.floats.push_back(static_cast<float>(sigma_));
  return c;
}

GaussianAnchorMap GaussianAnchorMap::from_container(const Container& c) {
  if (c.kind != ContainerKind::kAnchorMap || c.dims.size() != 2 ||
      c.floats.size() != std::size_t{c.dims[0]} * c.dims[1] + 1) {
    throw FormatError("container is not an anchor map");
  }
  std::vector<float> a(c.floats.begin(), c.floats.end() - 1);
  return GaussianAnchorMap(FeatureMatrix(c.dims[0], c.dims[1], std::move(a)), c.floats.back(),
                           c.seed);
}

double anchor_bandwidth(const FeatureMatrix& population, const FeatureMatrix& anchors) {
  if (population.rows() == 0) throw InsufficientDataError("sigma over an empty population");
  if (population.cols() != anchors.cols()) throw ShapeError("anchor bandwidth: dimension mismatch");
  std::vector<double> mins(population.rows());
  kernels::min_anchor_distance(population, anchors, mins);
  double sum = 0.0;
  for (double m : mins) sum += m;
  return sum / static_cast<double>(population.rows());
}

GaussianAnchorMap fit_anchor_map(const FeatureMatrix& labeled, const FeatureMatrix& population,
                                 std::size_t h, std::uint64_t seed) {
  if (h == 0) throw ConfigError("anchor map needs h >= 1");
  if (h > labeled.rows()) {
    throw InsufficientDataError("h=" + std::to_string(h) + " anchors requested from " +
                                std::to_string(labeled.rows()) + " labeled items");
  }
  std::vector<Index> idx(labeled.rows());
  std::iota(idx.begin(), idx.end(), Index{0});
  Rng rng = make_rng(seed, 0xa7c);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(h);
  FeatureMatrix anchors = labeled.select_rows(idx);
  const double sigma = anchor_bandwidth(population, anchors);
  if (!(sigma > 0.0)) {
    throw DegenerateError("anchor bandwidth is 0: every training item coincides with an anchor");
  }
  return GaussianAnchorMap(std::move(anchors), sigma, seed);
}

GaussianAnchorMap fit_anchor_map(const FeatureMatrix& labeled, std::size_t h, std::uint64_t seed) {
  return fit_anchor_map(labeled, labeled, h, seed);
}

}  // namespace hashbench
