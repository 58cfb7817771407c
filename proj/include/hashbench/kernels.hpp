#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial::` is the
// plain reference loop kept for testing and benchmarking, `omp::` is the
// OpenMP version the library calls. Element-wise kernels produce bitwise
// identical output in both versions; reductions split rows into fixed
// kReductionChunk blocks and combine them in block order, so the OpenMP
// result is independent of the thread count.

#include <cstddef>
#include <cstdint>
#include <span>

#include "hashbench/types.hpp"

namespace hashbench::kernels {

/// Squared L2 distance accumulated in double over four interleaved lanes.
inline double squared_l2(const float* a, const float* b, std::size_t n) noexcept {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = static_cast<double>(a[i]) - b[i];
    const double d1 = static_cast<double>(a[i + 1]) - b[i + 1];
    const double d2 = static_cast<double>(a[i + 2]) - b[i + 2];
    const double d3 = static_cast<double>(a[i + 3]) - b[i + 3];
    acc0 += d0 * d0;
    acc1 += d1 * d1;
    acc2 += d2 * d2;
    acc3 += d3 * d3;
  }
  double s = (acc0 + acc1) + (acc2 + acc3);
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

template <class T, class U>
inline double dot(const T* a, const U* b, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

/// Inputs of a (linear or one-hidden-layer) softmax classifier loss.
struct SoftmaxBatch {
  const Matrix<double>* features = nullptr;
  std::span<const Label> labels;
  std::size_t num_classes = 0;
};

/// Parameter layout of a one-hidden-layer head: W1 (H x D), b1 (H),
/// W2 (C x H), b2 (C), contiguous in that order.
struct MlpShape {
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  std::size_t num_classes = 0;
  std::size_t parameter_count() const noexcept {
    return hidden * input_dim + hidden + num_classes * hidden + num_classes;
  }
};

namespace serial {
#include "hashbench/detail/kernel_decls.inc"
}  // namespace serial

namespace omp {
#include "hashbench/detail/kernel_decls.inc"
}  // namespace omp

using namespace omp;

}  // namespace hashbench::kernels
