#include "hashbench/kmeans.hpp"

#include <algorithm>
#include <cstring>
#include <random>
#include <string>

#include "hashbench/error.hpp"
#include "hashbench/kernels.hpp"
#include "hashbench/random.hpp"

namespace hashbench {

namespace {

std::vector<float> seed_plus_plus(const float* data, std::size_t n, std::size_t dim,
                                  std::size_t k, Rng& rng) {
  std::vector<float> centroids(k * dim);
  std::vector<double> best(n, 0.0), fresh(n);
  std::vector<std::uint32_t> unused(n);
  std::vector<bool> chosen(n, false);

  auto take = [&](std::size_t c, std::size_t point) {
    chosen[point] = true;
    std::memcpy(centroids.data() + c * dim, data + point * dim, dim * sizeof(float));
    kernels::assign_nearest(data, n, dim, centroids.data() + c * dim, 1, unused, fresh);
    for (std::size_t i = 0; i < n; ++i) best[i] = c == 0 ? fresh[i] : std::min(best[i], fresh[i]);
  };

  take(0, std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : best) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += best[i];
        if (best[i] > 0.0 && acc >= target) {
          pick = i;
          break;
        }
      }
      // Rounding can leave target just above the final sum.
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (best[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Every point coincides with a chosen centroid.
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) -
                                      chosen.begin());
      if (pick == n) pick = c % n;
    }
    take(c, pick);
  }
  return centroids;
}

/// Moves each empty cluster onto the point currently farthest from its
/// centroid (lowest index on ties) among clusters with more than one member.
void reseed_empty(const float* data, std::size_t dim, std::size_t k, std::vector<float>& centroids,
                  std::vector<std::uint32_t>& assign, std::vector<double>& dist) {
  std::vector<std::size_t> sizes(k, 0);
  for (auto a : assign) ++sizes[a];
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] != 0) continue;
    std::size_t far = assign.size();
    for (std::size_t i = 0; i < assign.size(); ++i) {
      if (sizes[assign[i]] < 2) continue;
      if (far == assign.size() || dist[i] > dist[far]) far = i;
    }
    if (far == assign.size() || dist[far] <= 0.0) continue;
    --sizes[assign[far]];
    ++sizes[c];
    assign[far] = static_cast<std::uint32_t>(c);
    dist[far] = 0.0;
    std::memcpy(centroids.data() + c * dim, data + far * dim, dim * sizeof(float));
  }
}

std::vector<float> update_centroids(const float* data, std::size_t n, std::size_t dim,
                                    std::size_t k, const std::vector<std::uint32_t>& assign,
                                    const std::vector<float>& previous) {
  std::vector<double> sums(k * dim, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double* s = sums.data() + assign[i] * dim;
    const float* x = data + i * dim;
    for (std::size_t t = 0; t < dim; ++t) s[t] += x[t];
    ++counts[assign[i]];
  }
  std::vector<float> out(previous);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    const double inv = 1.0 / static_cast<double>(counts[c]);
    for (std::size_t t = 0; t < dim; ++t) {
      out[c * dim + t] = static_cast<float>(sums[c * dim + t] * inv);
    }
  }
  return out;
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

KMeansResult kmeans(const float* data, std::size_t n, std::size_t dim, const KMeansParams& params) {
  if (params.k == 0) throw ConfigError("k-means with k = 0");
  if (n < params.k) {
    throw InsufficientDataError("k-means needs at least k=" + std::to_string(params.k) +
                                " points, got " + std::to_string(n));
  }
  Rng rng = make_rng(params.seed);
  const std::size_t k = params.k;

  KMeansResult res;
  res.dim = dim;
  res.centroids = seed_plus_plus(data, n, dim, k, rng);
  res.assignment.resize(n);
  std::vector<double> dist(n);
  kernels::assign_nearest(data, n, dim, res.centroids.data(), k, res.assignment, dist);
  reseed_empty(data, dim, k, res.centroids, res.assignment, dist);
  res.objective.push_back(total(dist));

  std::vector<std::uint32_t> next_assign(n);
  for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
    auto next = update_centroids(data, n, dim, k, res.assignment, res.centroids);
    kernels::assign_nearest(data, n, dim, next.data(), k, next_assign, dist);
    reseed_empty(data, dim, k, next, next_assign, dist);
    const double obj = total(dist);
    const double prev = res.objective.back();
    // Float rounding of the centroids can undo a vanishing improvement; such
    // a step is rejected and training ends.
    if (obj > prev) break;
    res.centroids = std::move(next);
    res.assignment.swap(next_assign);
    res.objective.push_back(obj);
    if (prev <= 0.0 || (prev - obj) / prev < params.tolerance) break;
  }
  return res;
}

}  // namespace hashbench
