#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "hashbench/classifier.hpp"
#include "hashbench/kernels.hpp"
#include "hashbench/random.hpp"
#include "lbfgs.hpp"

namespace hashbench {

namespace {

void validate_labels(const Matrix<double>& features, std::span<const Label> labels,
                     std::size_t num_classes) {
  if (features.rows() != labels.size()) {
    throw ShapeError("classifier: " + std::to_string(features.rows()) + " rows vs " +
                     std::to_string(labels.size()) + " labels");
  }
  std::set<Label> seen;
  for (Label y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw RangeError("label " + std::to_string(y) + " outside [0, " +
                       std::to_string(num_classes) + ")");
    }
    seen.insert(y);
  }
  if (seen.size() < 2) throw DegenerateError("classifier training needs at least two classes");
}

}  // namespace

LabelVector argmax_rows(const ProbabilityMatrix& probs) {
  LabelVector out(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const auto row = probs.row(i);
    out[i] = static_cast<Label>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

SoftmaxObjective::SoftmaxObjective(const Matrix<double>& features, std::span<const Label> labels,
                                   std::size_t num_classes, double lambda)
    : batch_{&features, labels, num_classes},
      c_(num_classes),
      d_(features.cols()),
      lambda_(lambda) {
  if (features.rows() != labels.size()) throw ShapeError("objective: rows vs labels mismatch");
}

double SoftmaxObjective::evaluate(std::span<const double> params, std::span<double> grad) const {
  if (params.size() != parameter_count() || grad.size() != parameter_count()) {
    throw ShapeError("softmax objective: parameter vector has the wrong size");
  }
  const auto w = params.first(c_ * d_);
  const auto b = params.subspan(c_ * d_);
  const auto gw = grad.first(c_ * d_);
  const auto gb = grad.subspan(c_ * d_);
  const double sum = kernels::softmax_loss_grad(batch_, w, b, gw, gb);
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(1, batch_.labels.size()));
  double reg = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    reg += w[i] * w[i];
    gw[i] = gw[i] * inv_n + lambda_ * w[i];
  }
  for (double& v : gb) v *= inv_n;
  return sum * inv_n + 0.5 * lambda_ * reg;
}

SoftmaxModel::SoftmaxModel(Matrix<double> weights, std::vector<double> bias, double lambda,
                           std::uint64_t seed)
    : weights_(std::move(weights)), bias_(std::move(bias)), lambda_(lambda), seed_(seed) {
  if (weights_.rows() != bias_.size()) throw ShapeError("softmax: weights vs bias mismatch");
}

ProbabilityMatrix SoftmaxModel::predict_proba(const Matrix<double>& features) const {
  if (features.cols() != input_dim()) {
    throw ShapeError("softmax predict: features have width " + std::to_string(features.cols()) +
                     ", model expects " + std::to_string(input_dim()));
  }
  ProbabilityMatrix out;
  kernels::softmax_rows(features, weights_.values(), bias_, out);
  return out;
}

LabelVector SoftmaxModel::predict(const Matrix<double>& features) const {
  return argmax_rows(predict_proba(features));
}

Container SoftmaxModel::to_container() const {
  Container c;
  c.kind = ContainerKind::kSoftmaxModel;
  c.dims = {static_cast<std::uint32_t>(num_classes()), static_cast<std::uint32_t>(input_dim())};
  c.seed = static_cast<std::uint32_t>(seed_);
  c.floats.assign(weights_.values().begin(), weights_.values().end());
  c.floats.insert(c.floats.end(), bias_.begin(), bias_.end());
  c.floats.push_back(static_cast<float>(lambda_));
  return c;
}

SoftmaxModel SoftmaxModel::from_container(const Container& c) {
  if (c.kind != ContainerKind::kSoftmaxModel || c.dims.size() != 2) {
    throw FormatError("container is not a softmax model");
  }
  const std::size_t cl = c.dims[0], d = c.dims[1];
  if (c.floats.size() != cl * d + cl + 1) throw FormatError("softmax model payload size mismatch");
  Matrix<double> w(cl, d, std::vector<double>(c.floats.begin(), c.floats.begin() + cl * d));
  std::vector<double> b(c.floats.begin() + cl * d, c.floats.end() - 1);
  return SoftmaxModel(std::move(w), std::move(b), c.floats.back(), c.seed);
}

SoftmaxModel train_softmax(const Matrix<double>& features, std::span<const Label> labels,
                           std::size_t num_classes, const SoftmaxTrainParams& params,
                           TrainTrace* trace) {
  validate_labels(features, labels, num_classes);
  if (!(params.lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  const SoftmaxObjective objective(features, labels, num_classes, params.lambda);
  detail::LbfgsOptions opt;
  opt.max_iter = params.max_iter;
  opt.gradient_tolerance = params.gradient_tolerance;
  // The problem is convex; the zero start makes training a pure function of
  // (data, lambda).
  auto res = detail::minimize_lbfgs(
      [&](std::span<const double> x, std::span<double> g) { return objective.evaluate(x, g); },
      std::vector<double>(objective.parameter_count(), 0.0), opt);
  if (trace) {
    trace->losses = res.losses;
    trace->iterations = res.iterations;
    trace->converged = res.converged;
  }
  const std::size_t d = features.cols();
  Matrix<double> w(num_classes, d,
                   std::vector<double>(res.x.begin(), res.x.begin() + num_classes * d));
  std::vector<double> b(res.x.begin() + num_classes * d, res.x.end());
  return SoftmaxModel(std::move(w), std::move(b), params.lambda, params.seed);
}

// ---- MLP head ----------------------------------------------------------------

MlpObjective::MlpObjective(const Matrix<double>& features, std::span<const Label> labels,
                           const kernels::MlpShape& shape, double lambda)
    : batch_{&features, labels, shape.num_classes}, shape_(shape), lambda_(lambda) {
  if (features.rows() != labels.size()) throw ShapeError("objective: rows vs labels mismatch");
  if (features.cols() != shape.input_dim) throw ShapeError("objective: input width mismatch");
}

double MlpObjective::evaluate(std::span<const double> params, std::span<double> grad) const {
  if (params.size() != parameter_count() || grad.size() != parameter_count()) {
    throw ShapeError("mlp objective: parameter vector has the wrong size");
  }
  const double sum = kernels::mlp_loss_grad(batch_, shape_, params, grad);
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(1, batch_.labels.size()));
  for (double& v : grad) v *= inv_n;
  // Regularize W1 and W2, not the biases.
  const std::size_t w1 = shape_.hidden * shape_.input_dim;
  const std::size_t w2_begin = w1 + shape_.hidden;
  const std::size_t w2_end = w2_begin + shape_.num_classes * shape_.hidden;
  double reg = 0.0;
  auto add = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      reg += params[i] * params[i];
      grad[i] += lambda_ * params[i];
    }
  };
  add(0, w1);
  add(w2_begin, w2_end);
  return sum * inv_n + 0.5 * lambda_ * reg;
}

MlpModel::MlpModel(kernels::MlpShape shape, std::vector<double> params, double lambda,
                   std::uint64_t seed)
    : shape_(shape), params_(std::move(params)), lambda_(lambda), seed_(seed) {
  if (params_.size() != shape_.parameter_count()) throw ShapeError("mlp: parameter count mismatch");
}

ProbabilityMatrix MlpModel::predict_proba(const Matrix<double>& features) const {
  if (features.cols() != shape_.input_dim) throw ShapeError("mlp predict: width mismatch");
  ProbabilityMatrix out;
  kernels::mlp_predict(features, shape_, params_, out);
  return out;
}

LabelVector MlpModel::predict(const Matrix<double>& features) const {
  return argmax_rows(predict_proba(features));
}

Container MlpModel::to_container() const {
  Container c;
  c.kind = ContainerKind::kMlpHead;
  c.dims = {static_cast<std::uint32_t>(shape_.input_dim), static_cast<std::uint32_t>(shape_.hidden),
            static_cast<std::uint32_t>(shape_.num_classes)};
  c.seed = static_cast<std::uint32_t>(seed_);
  c.floats.assign(params_.begin(), params_.end());
  c.floats.push_back(static_cast<float>(lambda_));
  return c;
}

MlpModel MlpModel::from_container(const Container& c) {
  if (c.kind != ContainerKind::kMlpHead || c.dims.size() != 3) {
    throw FormatError("container is not an MLP head");
  }
  kernels::MlpShape s{c.dims[0], c.dims[1], c.dims[2]};
  if (c.floats.size() != s.parameter_count() + 1) throw FormatError("MLP payload size mismatch");
  return MlpModel(s, std::vector<double>(c.floats.begin(), c.floats.end() - 1), c.floats.back(),
                  c.seed);
}

MlpModel train_mlp(const Matrix<double>& features, std::span<const Label> labels,
                   std::size_t num_classes, const MlpTrainParams& params, TrainTrace* trace) {
  validate_labels(features, labels, num_classes);
  if (params.hidden == 0) throw ConfigError("mlp head needs at least one hidden unit");
  const kernels::MlpShape shape{features.cols(), params.hidden, num_classes};
  const MlpObjective objective(features, labels, shape, params.lambda);

  // He-style initialization of both weight layers, zero biases.
  std::vector<double> x0(shape.parameter_count(), 0.0);
  Rng rng = make_rng(params.seed, 0x3e1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t w1 = shape.hidden * shape.input_dim;
  const std::size_t w2 = w1 + shape.hidden;
  const double s1 = std::sqrt(2.0 / static_cast<double>(std::max<std::size_t>(1, shape.input_dim)));
  const double s2 = std::sqrt(2.0 / static_cast<double>(shape.hidden));
  for (std::size_t i = 0; i < w1; ++i) x0[i] = s1 * normal(rng);
  for (std::size_t i = w2; i < w2 + shape.num_classes * shape.hidden; ++i) x0[i] = s2 * normal(rng);

  detail::LbfgsOptions opt;
  opt.max_iter = params.max_iter;
  opt.gradient_tolerance = params.gradient_tolerance;
  auto res = detail::minimize_lbfgs(
      [&](std::span<const double> x, std::span<double> g) { return objective.evaluate(x, g); },
      std::move(x0), opt);
  if (trace) {
    trace->losses = res.losses;
    trace->iterations = res.iterations;
    trace->converged = res.converged;
  }
  return MlpModel(shape, std::move(res.x), params.lambda, params.seed);
}

}  // namespace hashbench
