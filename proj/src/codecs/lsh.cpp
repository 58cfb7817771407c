#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>

#include "hashbench/codecs.hpp"
#include "hashbench/kernels.hpp"
#include "hashbench/random.hpp"
#include "kernels/row_ops.hpp"

namespace hashbench {

namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Orthogonal n x n matrix from the QR factorization of a Gaussian matrix,
/// with columns sign-fixed so that R has a positive diagonal.
Mat random_orthogonal(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat g(n, n);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(g.rows(), g.cols());
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

template <class T>
BinaryCode encode_impl(const TightFrame& frame, std::span<const T> x) {
  if (x.size() != frame.input_dim()) {
    throw ShapeError("lsh_encode: input has dimension " + std::to_string(x.size()) +
                     ", frame expects " + std::to_string(frame.input_dim()));
  }
  const std::size_t d = frame.input_dim();
  std::vector<double> centered(d);
  for (std::size_t t = 0; t < d; ++t) {
    centered[t] = static_cast<double>(x[t]) - (frame.center() ? (*frame.center())[t] : 0.0);
  }
  BinaryCode code(frame.bits());
  for (std::size_t i = 0; i < frame.bits(); ++i) {
    const double proj = kernels::dot(frame.matrix().row(i).data(), centered.data(), d);
    code.set(i, proj >= 0.0);
  }
  return code;
}

template <class T>
BinaryCodeMatrix encode_rows_impl(const TightFrame& frame, const Matrix<T>& rows) {
  BinaryCodeMatrix out;
  out.count = rows.rows();
  out.bits = frame.bits();
  out.data.assign(out.count * out.code_bytes(), 0);
  const auto n = static_cast<std::ptrdiff_t>(rows.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const BinaryCode code = encode_impl<T>(frame, rows.row(static_cast<std::size_t>(i)));
    std::copy(code.bytes().begin(), code.bytes().end(),
              out.data.begin() + i * static_cast<std::ptrdiff_t>(out.code_bytes()));
  }
  return out;
}

}  // namespace

BinaryCode BinaryCode::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits) {
  BinaryCode code(bits);
  if (bytes.size() != code.bytes_.size()) {
    throw ShapeError("binary code of " + std::to_string(bits) + " bits needs " +
                     std::to_string(code.bytes_.size()) + " bytes");
  }
  std::copy(bytes.begin(), bytes.end(), code.bytes_.begin());
  return code;
}

std::size_t hamming_distance(const BinaryCode& a, const BinaryCode& b) {
  if (a.size() != b.size()) {
    throw ShapeError("hamming_distance: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + " bits");
  }
  return kernels::detail::popcount_xor(a.bytes().data(), b.bytes().data(), a.bytes().size());
}

TightFrame TightFrame::create(std::size_t input_dim, std::size_t bits, std::uint64_t seed) {
  if (input_dim < 1 || bits < 1) throw ConfigError("tight frame needs d >= 1 and b >= 1");
  TightFrame f;
  f.input_dim_ = input_dim;
  f.bits_ = bits;
  f.seed_ = seed;
  f.matrix_ = Matrix<double>(bits, input_dim);
  if (bits >= input_dim) {
    const Mat q = random_orthogonal(bits, seed);
    const double scale = std::sqrt(static_cast<double>(bits) / static_cast<double>(input_dim));
    for (std::size_t i = 0; i < bits; ++i) {
      for (std::size_t j = 0; j < input_dim; ++j) {
        f.matrix_(i, j) = scale * q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  } else {
    const Mat q = random_orthogonal(input_dim, seed);
    for (std::size_t i = 0; i < bits; ++i) {
      for (std::size_t j = 0; j < input_dim; ++j) {
        f.matrix_(i, j) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  check_invariant(f.identity_residual() < 1e-6, "tight_frame_identity",
                  "residual " + std::to_string(f.identity_residual()));
  return f;
}

void TightFrame::set_center(std::vector<double> center) {
  if (center.size() != input_dim_) throw ShapeError("tight frame center has wrong dimension");
  center_ = std::move(center);
}

double TightFrame::identity_residual() const {
  Eigen::Map<const Mat> a(matrix_.data(), static_cast<Eigen::Index>(bits_),
                          static_cast<Eigen::Index>(input_dim_));
  if (bits_ >= input_dim_) {
    const double s = static_cast<double>(bits_) / static_cast<double>(input_dim_);
    const Mat gram = a.transpose() * a;
    return (gram - s * Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  }
  const Mat gram = a * a.transpose();
  return (gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

Container TightFrame::to_container() const {
  Container c;
  c.kind = ContainerKind::kTightFrame;
  c.dims = {static_cast<std::uint32_t>(bits_), static_cast<std::uint32_t>(input_dim_),
            center_ ? 1u : 0u};
  c.seed = static_cast<std::uint32_t>(seed_);
  c.floats.assign(matrix_.values().begin(), matrix_.values().end());
  if (center_) c.floats.insert(c.floats.end(), center_->begin(), center_->end());
  return c;
}

TightFrame TightFrame::from_container(const Container& c) {
  if (c.kind != ContainerKind::kTightFrame || c.dims.size() != 3) {
    throw FormatError("container is not a tight frame");
  }
  TightFrame f;
  f.bits_ = c.dims[0];
  f.input_dim_ = c.dims[1];
  f.seed_ = c.seed;
  const bool has_center = c.dims[2] != 0;
  const std::size_t expect = f.bits_ * f.input_dim_ + (has_center ? f.input_dim_ : 0);
  if (c.floats.size() != expect || f.bits_ == 0 || f.input_dim_ == 0) {
    throw FormatError("tight frame payload size mismatch");
  }
  const auto split = c.floats.begin() + static_cast<std::ptrdiff_t>(f.bits_ * f.input_dim_);
  f.matrix_ = Matrix<double>(f.bits_, f.input_dim_, std::vector<double>(c.floats.begin(), split));
  if (has_center) f.center_ = std::vector<double>(split, c.floats.end());
  const double scale =
      std::max(1.0, static_cast<double>(f.bits_) / static_cast<double>(f.input_dim_));
  if (f.identity_residual() > 1e-4 * scale) {
    throw CorruptionError("stored tight frame violates the frame identity");
  }
  return f;
}

BinaryCode lsh_encode(const TightFrame& frame, std::span<const double> x) {
  return encode_impl<double>(frame, x);
}
BinaryCode lsh_encode(const TightFrame& frame, std::span<const float> x) {
  return encode_impl<float>(frame, x);
}

BinaryCodeMatrix lsh_encode_rows(const TightFrame& frame, const Matrix<double>& rows) {
  if (rows.cols() != frame.input_dim()) throw ShapeError("lsh_encode_rows: dimension mismatch");
  return encode_rows_impl(frame, rows);
}
BinaryCodeMatrix lsh_encode_rows(const TightFrame& frame, const FeatureMatrix& rows) {
  if (rows.cols() != frame.input_dim()) throw ShapeError("lsh_encode_rows: dimension mismatch");
  return encode_rows_impl(frame, rows);
}

}  // namespace hashbench
