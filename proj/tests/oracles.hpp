#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. They share no code with the library.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "hashbench/types.hpp"

namespace oracle {

/// AP@k with the double loop written out: for every rank i holding a
/// correct item, precision over ranks 1..i is recounted from scratch.
inline double average_precision(hashbench::Label query, const std::vector<hashbench::Label>& db,
                                 const std::vector<hashbench::Index>& ranking, std::size_t k,
                                 bool truncated = false) {
  std::size_t cl = 0;
  for (auto y : db) cl += (y == query);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (db[ranking[i]] != query) continue;
    std::size_t hits = 0;
    for (std::size_t j = 0; j <= i; ++j) hits += (db[ranking[j]] == query);
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  const std::size_t norm = truncated ? std::min(cl, k) : cl;
  return sum / static_cast<double>(norm);
}

inline double squared_distance(const float* a, const float* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

inline hashbench::FeatureMatrix gaussian_matrix(std::size_t rows, std::size_t cols,
                                                std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  hashbench::FeatureMatrix m(rows, cols);
  for (auto& v : m.values()) v = static_cast<float>(n(rng));
  return m;
}

/// Rows drawn from a Dirichlet(1) distribution, i.e. uniform on the simplex.
inline hashbench::ProbabilityMatrix simplex_rows(std::size_t rows, std::size_t cols,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  hashbench::ProbabilityMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += (m(i, j) = e(rng) + 1e-12);
    for (std::size_t j = 0; j < cols; ++j) m(i, j) /= s;
  }
  return m;
}

}  // namespace oracle
