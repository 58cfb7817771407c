#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hashbench/container.hpp"
#include "hashbench/kernels.hpp"
#include "hashbench/types.hpp"

namespace hashbench {

// ---- Gaussian anchor features ---------------------------------------------

/// Maps x to [exp(-||x - a_i||^2 / (2 sigma^2))]_{i=1..h}.
class GaussianAnchorMap {
 public:
  /// Throws DegenerateError unless sigma > 0.
  GaussianAnchorMap(FeatureMatrix anchors, double sigma, std::uint64_t seed);

  std::size_t size() const noexcept { return anchors_.rows(); }
  std::size_t input_dim() const noexcept { return anchors_.cols(); }
  double sigma() const noexcept { return sigma_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const FeatureMatrix& anchors() const noexcept { return anchors_; }

  std::vector<double> apply(std::span<const float> x) const;
  Matrix<double> apply_rows(const FeatureMatrix& x) const;

  Container to_container() const;
  static GaussianAnchorMap from_container(const Container& c);

 private:
  FeatureMatrix anchors_;
  double sigma_ = 0.0;
  std::uint64_t seed_ = 0;
};

/// sigma = mean over the rows of `population` of the (unsquared) distance to
/// the nearest anchor.
double anchor_bandwidth(const FeatureMatrix& population, const FeatureMatrix& anchors);

/// Samples h anchors uniformly without replacement from `labeled` and sets
/// sigma over every row of `population` (the full training set, labeled and
/// unlabeled). Throws InsufficientDataError when h > rows of `labeled`,
/// DegenerateError when sigma comes out as 0.
GaussianAnchorMap fit_anchor_map(const FeatureMatrix& labeled, const FeatureMatrix& population,
                                 std::size_t h, std::uint64_t seed);
/// Same, with sigma computed over `labeled` itself.
GaussianAnchorMap fit_anchor_map(const FeatureMatrix& labeled, std::size_t h, std::uint64_t seed);

// ---- multinomial logistic regression ---------------------------------------

struct SoftmaxTrainParams {
  double lambda = 1e-2;
  std::uint64_t seed = 0;
  std::size_t max_iter = 500;
  double gradient_tolerance = 1e-6;
};

struct TrainTrace {
  /// Objective after every accepted optimizer step (entry 0 = start).
  std::vector<double> losses;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Mean cross-entropy + (lambda / 2) ||W||^2; the bias is not regularized.
/// Parameters are laid out as W (C x D, row-major) followed by b (C).
class SoftmaxObjective {
 public:
  SoftmaxObjective(const Matrix<double>& features, std::span<const Label> labels,
                   std::size_t num_classes, double lambda);

  std::size_t parameter_count() const noexcept { return c_ * d_ + c_; }
  /// Returns the objective and overwrites grad.
  double evaluate(std::span<const double> params, std::span<double> grad) const;

 private:
  kernels::SoftmaxBatch batch_;
  std::size_t c_, d_;
  double lambda_;
};

class SoftmaxModel {
 public:
  SoftmaxModel(Matrix<double> weights, std::vector<double> bias, double lambda,
               std::uint64_t seed);

  std::size_t num_classes() const noexcept { return bias_.size(); }
  std::size_t input_dim() const noexcept { return weights_.cols(); }
  double lambda() const noexcept { return lambda_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const Matrix<double>& weights() const noexcept { return weights_; }
  std::span<const double> bias() const noexcept { return bias_; }

  /// Softmax rows; each sums to 1 and is strictly positive.
  ProbabilityMatrix predict_proba(const Matrix<double>& features) const;
  /// Row argmax, lowest class on ties.
  LabelVector predict(const Matrix<double>& features) const;

  Container to_container() const;
  static SoftmaxModel from_container(const Container& c);

 private:
  Matrix<double> weights_;
  std::vector<double> bias_;
  double lambda_ = 0.0;
  std::uint64_t seed_ = 0;
};

/// Full-batch L-BFGS with Armijo backtracking: the objective never increases
/// across accepted steps. Stops when max |grad| < gradient_tolerance or after
/// max_iter iterations. Labels must lie in [0, num_classes) and cover at
/// least two classes (DegenerateError otherwise).
SoftmaxModel train_softmax(const Matrix<double>& features, std::span<const Label> labels,
                           std::size_t num_classes, const SoftmaxTrainParams& params,
                           TrainTrace* trace = nullptr);

// ---- one-hidden-layer head ---------------------------------------------------

struct MlpTrainParams {
  std::size_t hidden = 128;
  double lambda = 1e-3;
  std::uint64_t seed = 0;
  std::size_t max_iter = 300;
  double gradient_tolerance = 1e-6;
};

/// Mean cross-entropy of a ReLU MLP + (lambda / 2)(||W1||^2 + ||W2||^2).
class MlpObjective {
 public:
  MlpObjective(const Matrix<double>& features, std::span<const Label> labels,
               const kernels::MlpShape& shape, double lambda);

  std::size_t parameter_count() const noexcept { return shape_.parameter_count(); }
  double evaluate(std::span<const double> params, std::span<double> grad) const;

 private:
  kernels::SoftmaxBatch batch_;
  kernels::MlpShape shape_;
  double lambda_;
};

class MlpModel {
 public:
  MlpModel(kernels::MlpShape shape, std::vector<double> params, double lambda, std::uint64_t seed);

  const kernels::MlpShape& shape() const noexcept { return shape_; }
  std::span<const double> parameters() const noexcept { return params_; }
  ProbabilityMatrix predict_proba(const Matrix<double>& features) const;
  LabelVector predict(const Matrix<double>& features) const;

  Container to_container() const;
  static MlpModel from_container(const Container& c);

 private:
  kernels::MlpShape shape_;
  std::vector<double> params_;
  double lambda_;
  std::uint64_t seed_;
};

MlpModel train_mlp(const Matrix<double>& features, std::span<const Label> labels,
                   std::size_t num_classes, const MlpTrainParams& params,
                   TrainTrace* trace = nullptr);

// ---- regularization selection ------------------------------------------------

struct CvReport {
  std::vector<double> grid;
  std::vector<double> accuracy;  // held-out accuracy per grid entry
  double chosen_lambda = 0.0;
  std::size_t chosen_index = 0;
  /// False when some class had fewer than two items and the split fell back
  /// to an unstratified one.
  bool stratified = true;
  std::size_t train_count = 0;
  std::size_t holdout_count = 0;
};

/// 10^-4 ... 10^2, seven logarithmic points.
std::vector<double> default_lambda_grid();

/// Trains on (train features, train labels, lambda) and predicts labels of
/// the held-out features.
using CvTrainer = std::function<LabelVector(const Matrix<double>&, std::span<const Label>, double,
                                            const Matrix<double>&)>;

/// Holds out 10% of the items (stratified by class when every class has at
/// least two items), trains once per grid value and keeps the most accurate
/// lambda; ties go to the smaller lambda, then to the earlier grid entry.
CvReport cross_validate(const Matrix<double>& features, std::span<const Label> labels,
                        std::span<const double> grid, std::uint64_t seed,
                        const CvTrainer& trainer);

CvReport cross_validate_lambda(const Matrix<double>& features, std::span<const Label> labels,
                               std::size_t num_classes, std::span<const double> grid,
                               std::uint64_t seed, const SoftmaxTrainParams& base = {});

/// Row argmax, lowest index on ties.
LabelVector argmax_rows(const ProbabilityMatrix& probs);

}  // namespace hashbench
