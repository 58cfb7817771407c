#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hashbench/error.hpp"

namespace hashbench {

using Label = std::int32_t;
using Index = std::uint32_t;

using LabelVector = std::vector<Label>;
/// Permutation (or top-k prefix of one) of database indices.
using Ranking = std::vector<Index>;

/// Dense row-major matrix with value semantics.
template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("matrix payload does not match rows*cols");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<const T> values() const noexcept { return data_; }
  std::span<T> values() noexcept { return data_; }

  /// Copy of the rows listed in `idx`, in that order.
  Matrix select_rows(std::span<const Index> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      auto src = row(idx[r]);
      std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// N x d descriptors, stored in single precision as on disk.
using FeatureMatrix = Matrix<float>;
/// N x C class-posterior rows.
using ProbabilityMatrix = Matrix<double>;

template <class U, class T>
Matrix<U> matrix_cast(const Matrix<T>& m) {
  std::vector<U> out(m.values().begin(), m.values().end());
  return Matrix<U>(m.rows(), m.cols(), std::move(out));
}

}  // namespace hashbench
