#pragma once

// Per-row building blocks shared by the serial and OpenMP kernels so that
// both produce the same per-element arithmetic.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include "hashbench/kernels.hpp"
#include "hashbench/parallel.hpp"

namespace hashbench::kernels::detail {

inline std::uint32_t popcount_xor(const std::uint8_t* a, const std::uint8_t* b,
                                  std::size_t bytes) noexcept {
  std::uint32_t count = 0;
  std::size_t i = 0;
  for (; i + 8 <= bytes; i += 8) {
    std::uint64_t wa, wb;
    std::memcpy(&wa, a + i, 8);
    std::memcpy(&wb, b + i, 8);
    count += static_cast<std::uint32_t>(std::popcount(wa ^ wb));
  }
  for (; i < bytes; ++i) {
    count += static_cast<std::uint32_t>(std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
  }
  return count;
}

inline double adc_row(const double* table, std::size_t m, std::size_t ks,
                      const std::uint16_t* code) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) s += table[j * ks + code[j]];
  return s;
}

inline void nearest_row(const float* x, std::size_t dim, const float* centroids, std::size_t k,
                        std::uint32_t& best, double& best_dist) noexcept {
  best = 0;
  best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const double d = squared_l2(x, centroids + c * dim, dim);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<std::uint32_t>(c);
    }
  }
}

inline double min_distance_row(const float* x, const FeatureMatrix& anchors) noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < anchors.rows(); ++j) {
    best = std::min(best, squared_l2(x, anchors.row(j).data(), anchors.cols()));
  }
  return std::sqrt(best);
}

inline void gaussian_row(const float* x, const FeatureMatrix& anchors, double inv_two_sigma_sq,
                         double* out) noexcept {
  for (std::size_t j = 0; j < anchors.rows(); ++j) {
    out[j] = std::exp(-squared_l2(x, anchors.row(j).data(), anchors.cols()) * inv_two_sigma_sq);
  }
}

/// Writes softmax(logits) into logits in place; returns log-sum-exp.
inline double softmax_inplace(double* logits, std::size_t c) noexcept {
  double mx = logits[0];
  for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, logits[j]);
  double sum = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    logits[j] = std::exp(logits[j] - mx);
    sum += logits[j];
  }
  const double inv = 1.0 / sum;
  // Underflowed entries are floored so every posterior stays strictly positive.
  for (std::size_t j = 0; j < c; ++j) {
    logits[j] = std::max(logits[j] * inv, std::numeric_limits<double>::min());
  }
  return mx + std::log(sum);
}

inline void linear_logits(const double* x, std::size_t d, const double* w, const double* b,
                          std::size_t c, double* out) noexcept {
  for (std::size_t j = 0; j < c; ++j) out[j] = b[j] + dot(w + j * d, x, d);
}

/// Loss of one row and its gradient contribution, added into gw/gb.
/// `scratch` holds at least c doubles.
inline double softmax_row_loss_grad(const double* x, std::size_t d, Label y, const double* w,
                                    const double* b, std::size_t c, double* scratch, double* gw,
                                    double* gb) noexcept {
  linear_logits(x, d, w, b, c, scratch);
  const double logit_y = scratch[y];
  const double lse = softmax_inplace(scratch, c);
  for (std::size_t j = 0; j < c; ++j) {
    const double r = scratch[j] - (static_cast<std::size_t>(y) == j ? 1.0 : 0.0);
    gb[j] += r;
    double* gwj = gw + j * d;
    for (std::size_t t = 0; t < d; ++t) gwj[t] += r * x[t];
  }
  return lse - logit_y;
}

struct MlpView {
  const double* w1;
  const double* b1;
  const double* w2;
  const double* b2;
};

inline MlpView mlp_view(const MlpShape& s, const double* p) noexcept {
  MlpView v{};
  v.w1 = p;
  v.b1 = v.w1 + s.hidden * s.input_dim;
  v.w2 = v.b1 + s.hidden;
  v.b2 = v.w2 + s.num_classes * s.hidden;
  return v;
}

/// Hidden activations into scratch[0, hidden), logits after them.
inline void mlp_row_forward(const double* x, const MlpShape& s, const MlpView& v,
                              double* scratch) noexcept {
  double* h = scratch;
  double* z = scratch + s.hidden;
  for (std::size_t u = 0; u < s.hidden; ++u) {
    h[u] = std::max(0.0, v.b1[u] + dot(v.w1 + u * s.input_dim, x, s.input_dim));
  }
  linear_logits(h, s.hidden, v.w2, v.b2, s.num_classes, z);
}

/// Adds the gradient of one row into g (same layout as params).
/// scratch: 2 * hidden + num_classes doubles.
inline double mlp_row_loss_grad(const double* x, Label y, const MlpShape& s, const MlpView& v,
                                double* scratch, double* g) noexcept {
  mlp_row_forward(x, s, v, scratch);
  double* h = scratch;
  double* z = scratch + s.hidden;
  double* dh = scratch + s.hidden + s.num_classes;
  const double logit_y = z[y];
  const double lse = softmax_inplace(z, s.num_classes);

  double* gw1 = g;
  double* gb1 = gw1 + s.hidden * s.input_dim;
  double* gw2 = gb1 + s.hidden;
  double* gb2 = gw2 + s.num_classes * s.hidden;

  std::fill(dh, dh + s.hidden, 0.0);
  for (std::size_t j = 0; j < s.num_classes; ++j) {
    const double r = z[j] - (static_cast<std::size_t>(y) == j ? 1.0 : 0.0);
    gb2[j] += r;
    const double* w2j = v.w2 + j * s.hidden;
    double* gw2j = gw2 + j * s.hidden;
    for (std::size_t u = 0; u < s.hidden; ++u) {
      gw2j[u] += r * h[u];
      dh[u] += r * w2j[u];
    }
  }
  for (std::size_t u = 0; u < s.hidden; ++u) {
    if (h[u] <= 0.0) continue;
    gb1[u] += dh[u];
    double* gw1u = gw1 + u * s.input_dim;
    for (std::size_t t = 0; t < s.input_dim; ++t) gw1u[t] += dh[u] * x[t];
  }
  return lse - logit_y;
}

inline std::size_t chunk_count(std::size_t n) noexcept {
  return (n + kReductionChunk - 1) / kReductionChunk;
}

}  // namespace hashbench::kernels::detail
