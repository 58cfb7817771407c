#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "hashbench/classifier.hpp"
#include "hashbench/metrics.hpp"
#include "hashbench/random.hpp"

namespace hashbench {

namespace {

std::size_t holdout_size(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 * static_cast<double>(n))));
}

}  // namespace

std::vector<double> default_lambda_grid() { return {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0}; }

CvReport cross_validate(const Matrix<double>& features, std::span<const Label> labels,
                        std::span<const double> grid, std::uint64_t seed,
                        const CvTrainer& trainer) {
  if (grid.empty()) throw ConfigError("cross-validation grid is empty");
  if (features.rows() != labels.size()) throw ShapeError("cross-validation: rows vs labels");
  if (labels.size() < 2) throw InsufficientDataError("cross-validation needs at least two items");

  CvReport report;
  report.grid.assign(grid.begin(), grid.end());

  std::map<Label, std::vector<Index>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(static_cast<Index>(i));
  report.stratified = std::all_of(by_class.begin(), by_class.end(),
                                  [](const auto& kv) { return kv.second.size() >= 2; });

  Rng rng = make_rng(seed, 0xc5);
  std::vector<bool> held(labels.size(), false);
  if (report.stratified) {
    for (auto& [label, items] : by_class) {
      std::shuffle(items.begin(), items.end(), rng);
      const std::size_t take = std::min(holdout_size(items.size()), items.size() - 1);
      for (std::size_t i = 0; i < take; ++i) held[items[i]] = true;
    }
  } else {
    std::vector<Index> all(labels.size());
    std::iota(all.begin(), all.end(), Index{0});
    std::shuffle(all.begin(), all.end(), rng);
    const std::size_t take = std::min(holdout_size(all.size()), all.size() - 1);
    for (std::size_t i = 0; i < take; ++i) held[all[i]] = true;
  }

  std::vector<Index> train_idx, hold_idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (held[i] ? hold_idx : train_idx).push_back(static_cast<Index>(i));
  }
  report.train_count = train_idx.size();
  report.holdout_count = hold_idx.size();

  const auto train_x = features.select_rows(train_idx);
  const auto hold_x = features.select_rows(hold_idx);
  LabelVector train_y, hold_y;
  for (auto i : train_idx) train_y.push_back(labels[i]);
  for (auto i : hold_idx) hold_y.push_back(labels[i]);

  for (double lambda : grid) {
    const auto predicted = trainer(train_x, train_y, lambda, hold_x);
    report.accuracy.push_back(classification_accuracy(predicted, hold_y));
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double best = report.accuracy[report.chosen_index];
    if (report.accuracy[i] > best ||
        (report.accuracy[i] == best && grid[i] < grid[report.chosen_index])) {
      report.chosen_index = i;
    }
  }
  report.chosen_lambda = grid[report.chosen_index];
  return report;
}

CvReport cross_validate_lambda(const Matrix<double>& features, std::span<const Label> labels,
                               std::size_t num_classes, std::span<const double> grid,
                               std::uint64_t seed, const SoftmaxTrainParams& base) {
  return cross_validate(features, labels, grid, seed,
                        [&](const Matrix<double>& x, std::span<const Label> y, double lambda,
                            const Matrix<double>& holdout) {
                          SoftmaxTrainParams p = base;
                          p.lambda = lambda;
                          p.seed = seed;
                          return train_softmax(x, y, num_classes, p).predict(holdout);
                        });
}

}  // namespace hashbench
