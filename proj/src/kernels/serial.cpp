#include <algorithm>
#include <vector>

#include "hashbench/kernels.hpp"
#include "row_ops.hpp"

namespace hashbench::kernels::serial {

void squared_l2_scan(const FeatureMatrix& db, std::span<const float> q, std::span<double> out) {
  for (std::size_t i = 0; i < db.rows(); ++i) {
    out[i] = squared_l2(db.row(i).data(), q.data(), db.cols());
  }
}

void inner_product_scan(const Matrix<double>& db, std::span<const double> q,
                        std::span<double> out) {
  for (std::size_t i = 0; i < db.rows(); ++i) out[i] = dot(db.row(i).data(), q.data(), db.cols());
}

void inner_product_scan(const FeatureMatrix& db, std::span<const float> q, std::span<double> out) {
  for (std::size_t i = 0; i < db.rows(); ++i) out[i] = dot(db.row(i).data(), q.data(), db.cols());
}

void hamming_scan(std::span<const std::uint8_t> codes, std::size_t code_bytes,
                  std::span<const std::uint8_t> q, std::span<std::uint32_t> out) {
  const std::size_t n = code_bytes == 0 ? 0 : codes.size() / code_bytes;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = detail::popcount_xor(codes.data() + i * code_bytes, q.data(), code_bytes);
  }
}

void adc_scan(std::span<const double> table, std::size_t m, std::size_t ks,
              std::span<const std::uint16_t> codes, std::span<double> out) {
  const std::size_t n = m == 0 ? 0 : codes.size() / m;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = detail::adc_row(table.data(), m, ks, codes.data() + i * m);
  }
}

void assign_nearest(const float* points, std::size_t n, std::size_t dim, const float* centroids,
                    std::size_t k, std::span<std::uint32_t> assign, std::span<double> dist) {
  for (std::size_t i = 0; i < n; ++i) {
    detail::nearest_row(points + i * dim, dim, centroids, k, assign[i], dist[i]);
  }
}

void min_anchor_distance(const FeatureMatrix& x, const FeatureMatrix& anchors,
                         std::span<double> out) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out[i] = detail::min_distance_row(x.row(i).data(), anchors);
  }
}

void gaussian_features(const FeatureMatrix& x, const FeatureMatrix& anchors, double sigma,
                       Matrix<double>& out) {
  out = Matrix<double>(x.rows(), anchors.rows());
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    detail::gaussian_row(x.row(i).data(), anchors, inv, out.row(i).data());
  }
}

void softmax_rows(const Matrix<double>& x, std::span<const double> weights,
                  std::span<const double> bias, Matrix<double>& out) {
  const std::size_t c = bias.size();
  out = Matrix<double>(x.rows(), c);
  for (std::size_t i = 0; i < x.rows(); ++i) {
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
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
  std::vector<double> scratch(c);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    loss += detail::softmax_row_loss_grad(x.row(i).data(), x.cols(), batch.labels[i],
                                          weights.data(), bias.data(), c, scratch.data(),
                                          grad_weights.data(), grad_bias.data());
  }
  return loss;
}

double mlp_loss_grad(const SoftmaxBatch& batch, const MlpShape& shape,
                     std::span<const double> params, std::span<double> grad) {
  const auto& x = *batch.features;
  const auto view = detail::mlp_view(shape, params.data());
  std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<double> scratch(2 * shape.hidden + shape.num_classes);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    loss += detail::mlp_row_loss_grad(x.row(i).data(), batch.labels[i], shape, view,
                                      scratch.data(), grad.data());
  }
  return loss;
}

void mlp_predict(const Matrix<double>& x, const MlpShape& shape, std::span<const double> params,
                 Matrix<double>& out) {
  const auto view = detail::mlp_view(shape, params.data());
  out = Matrix<double>(x.rows(), shape.num_classes);
  std::vector<double> scratch(shape.hidden + shape.num_classes);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    detail::mlp_row_forward(x.row(i).data(), shape, view, scratch.data());
    double* z = scratch.data() + shape.hidden;
    detail::softmax_inplace(z, shape.num_classes);
    std::copy(z, z + shape.num_classes, out.row(i).begin());
  }
}

}  // namespace hashbench::kernels::serial
