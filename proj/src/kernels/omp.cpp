#include <omp.h>

#include <algorithm>
#include <vector>

#include "hashbench/kernels.hpp"
#include "hashbench/parallel.hpp"
#include "row_ops.hpp"

namespace hashbench {

void set_num_threads(int n) {
  static const int default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : default_threads);
}

int num_threads() { return omp_get_max_threads(); }

}  // namespace hashbench

namespace hashbench::kernels::omp {

namespace {

using Row = std::ptrdiff_t;

inline Row rows_of(std::size_t n) { return static_cast<Row>(n); }

/// Runs body(chunk, partial) for every kReductionChunk block of n rows,
/// each block writing into its own zeroed partial buffer of `width` doubles,
/// then sums the partials into `out` in block order. Returns the sum of the
/// per-block scalar results, also in block order.
template <class Body>
double chunked_reduce(std::size_t n, std::size_t width, std::span<double> out, Body&& body) {
  const std::size_t chunks = detail::chunk_count(n);
  std::vector<double> partial(chunks * width, 0.0);
  std::vector<double> scalar(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (Row c = 0; c < rows_of(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(n, begin + kReductionChunk);
    scalar[c] = body(begin, end, partial.data() + static_cast<std::size_t>(c) * width);
  }
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const double* p = partial.data() + c * width;
    for (std::size_t j = 0; j < width; ++j) out[j] += p[j];
    total += scalar[c];
  }
  return total;
}

}  // namespace

void squared_l2_scan(const FeatureMatrix& db, std::span<const float> q, std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (Row i = 0; i < rows_of(db.rows()); ++i) {
    out[i] = squared_l2(db.row(i).data(), q.data(), db.cols());
  }
}

void inner_product_scan(const Matrix<double>& db, std::span<const double> q,
                        std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (Row i = 0; i < rows_of(db.rows()); ++i) {
    out[i] = dot(db.row(i).data(), q.data(), db.cols());
  }
}

void inner_product_scan(const FeatureMatrix& db, std::span<const float> q, std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (Row i = 0; i < rows_of(db.rows()); ++i) {
    out[i] = dot(db.row(i).data(), q.data(), db.cols());
  }
}

void hamming_scan(std::span<const std::uint8_t> codes, std::size_t code_bytes,
                  std::span<const std::uint8_t> q, std::span<std::uint32_t> out) {
  const std::size_t n = code_bytes == 0 ? 0 : codes.size() / code_bytes;
#pragma omp parallel for schedule(static)
  for (Row i = 0; i < rows_of(n); ++i) {
    out[i] = detail::popcount_xor(codes.data() + i * code_bytes, q.data(), code_bytes);
  }
}

void adc_scan(std::span<const double> table, std::size_t m, std::size_t ks,
              std::span<const std::uint16_t> codes, std::span<double> out) {
  const std::size_t n = m == 0 ? 0 : codes.size() / m;
#pragma omp parallel for schedule(static)
  for (Row i = 0; i < rows_of(n); ++i) {
    out[i] = detail::adc_row(table.data(), m, ks, codes.data() + i * m);
  }
}

void assign_nearest(const float* points, std::size_t n, std::size_t dim, const float* centroids,
                    std::size_t k, std::span<std::uint32_t> assign, std::span<double> dist) {
#pragma omp parallel for schedule(static)
  for (Row i = 0; i < rows_of(n); ++i) {
    detail::nearest_row(points + i * dim, dim, centroids, k, assign[i], dist[i]);
  }
}

void min_anchor_distance(const FeatureMatrix& x, const FeatureMatrix& anchors,
                         std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (Row i = 0; i < rows_of(x.rows()); ++i) {
    out[i] = detail::min_distance_row(x.row(i).data(), anchors);
  }
}

void gaussian_features(const FeatureMatrix& x, const FeatureMatrix& anchors, double sigma,
                       Matrix<double>& out) {
  out = Matrix<double>(x.rows(), anchors.rows());
  const double inv = 1.0 / (2.0 * sigma * sigma);
#pragma omp parallel for schedule(static)
  for (Row i = 0; i < rows_of(x.rows()); ++i) {
    detail::gaussian_row(x.row(i).data(), anchors, inv, out.row(i).data());
  }
}

void softmax_rows(const Matrix<double>& x, std::span<const double> weights,
                  std::span<const double> bias, Matrix<double>& out) {
  const std::size_t c = bias.size();
  out = Matrix<double>(x.rows(), c);
#pragma omp parallel for schedule(static)
  for (Row i = 0; i < rows_of(x.rows()); ++i) {
    double* row = out.row(i).data();
    detail::linear_logits(x.row(i).data(), x.cols(), weights.data(), bias.data(), c, row);
    detail::softmax_inplace(row, c);
  }
}

double softmax_loss_grad(const SoftmaxBatch& batch, std::span<const double> weights,
                         std::span<const double> bias, std::span<double> grad_weights,
                         std::span<double> grad_bias) {
  const auto& x = *batch.features;
  const std::size_t c = batch.num_classes;
  const std::size_t d = x.cols();
  const std::size_t width = c * d + c;
  std::vector<double> grad(width);
  const double loss =
      chunked_reduce(x.rows(), width, grad, [&](std::size_t begin, std::size_t end, double* g) {
        std::vector<double> scratch(c);
        double part = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          part += detail::softmax_row_loss_grad(x.row(i).data(), d, batch.labels[i],
                                                weights.data(), bias.data(), c, scratch.data(),
                                                g, g + c * d);
        }
        return part;
      });
  std::copy(grad.begin(), grad.begin() + static_cast<std::ptrdiff_t>(c * d), grad_weights.begin());
  std::copy(grad.begin() + static_cast<std::ptrdiff_t>(c * d), grad.end(), grad_bias.begin());
  return loss;
}

double mlp_loss_grad(const SoftmaxBatch& batch, const MlpShape& shape,
                     std::span<const double> params, std::span<double> grad) {
  const auto& x = *batch.features;
  const auto view = detail::mlp_view(shape, params.data());
  return chunked_reduce(
      x.rows(), shape.parameter_count(), grad,
      [&](std::size_t begin, std::size_t end, double* g) {
        std::vector<double> scratch(2 * shape.hidden + shape.num_classes);
        double part = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          part += detail::mlp_row_loss_grad(x.row(i).data(), batch.labels[i], shape, view,
                                            scratch.data(), g);
        }
        return part;
      });
}

void mlp_predict(const Matrix<double>& x, const MlpShape& shape, std::span<const double> params,
                 Matrix<double>& out) {
  const auto view = detail::mlp_view(shape, params.data());
  out = Matrix<double>(x.rows(), shape.num_classes);
#pragma omp parallel
  {
    std::vector<double> scratch(shape.hidden + shape.num_classes);
#pragma omp for schedule(static)
    for (Row i = 0; i < rows_of(x.rows()); ++i) {
      detail::mlp_row_forward(x.row(i).data(), shape, view, scratch.data());
      double* z = scratch.data() + shape.hidden;
      detail::softmax_inplace(z, shape.num_classes);
      std::copy(z, z + shape.num_classes, out.row(i).begin());
    }
  }
}

}  // namespace hashbench::kernels::omp
