#include <memory>
#include <string>

#include "hashbench/pq.hpp"
#include "hashbench/protocols.hpp"
#include "hashbench/random.hpp"

namespace hashbench {

namespace {

LabelVector fit_and_predict(const HeadConfig& head, std::size_t num_classes,
                            const Matrix<double>& x, std::span<const Label> y, double lambda,
                            std::uint64_t seed, const Matrix<double>& test) {
  if (head.kind == HeadKind::kSoftmax) {
    SoftmaxTrainParams p;
    p.lambda = lambda;
    p.seed = seed;
    p.max_iter = head.max_iter;
    return train_softmax(x, y, num_classes, p).predict(test);
  }
  MlpTrainParams p;
  p.hidden = head.hidden;
  p.lambda = lambda;
  p.seed = seed;
  p.max_iter = head.max_iter;
  return train_mlp(x, y, num_classes, p).predict(test);
}

}  // namespace

ProtocolReport run_protocol2(const Dataset& data, std::span<const ClassSplit> splits,
                             const TransferConfig& config) {
  if (config.codec.kind == CodecKind::kLsh) {
    throw UnsupportedCodecError("Protocol 2 needs a codec with a decoder; " +
                                config.codec.label() + " has none");
  }
  if (data.features.rows() == 0 || data.features.rows() != data.labels.size()) {
    throw ShapeError("Protocol 2 needs one feature row per labeled item");
  }
  if (splits.empty()) throw ConfigError("Protocol 2 needs at least one class split");
  if (config.head.lambda_grid.empty()) throw ConfigError("empty lambda grid");

  ProtocolReport report;
  report.protocol = "transfer";
  report.dataset = data.name;
  report.method = config.codec.label();
  report.metric = "accuracy";
  report.code_size_bits = config.codec.code_size_bits();
  report.config = {{"seed", std::to_string(config.seed)},
                   {"head", config.head.kind == HeadKind::kSoftmax
                                ? std::string("softmax")
                                : "mlp(" + std::to_string(config.head.hidden) + ")"},
                   {"test_fraction", std::to_string(config.test_fraction)},
                   {"folds", std::to_string(splits.size())}};

  const auto flags = item_test_flags(data, config.test_fraction, derive_seed(config.seed, 0));

  for (const auto& split : splits) {
    const auto items = split_items(data, split, flags);
    if (items.train25.empty() || items.test25.empty()) {
      throw InsufficientDataError("fold " + std::to_string(split.fold) +
                                  " has an empty train25 or test25 set");
    }
    const std::uint64_t fold_seed = derive_seed(config.seed, 1 + static_cast<std::uint64_t>(split.fold));

    std::vector<Label> dense(data.num_classes, -1);
    for (std::size_t i = 0; i < split.held_out_classes.size(); ++i) {
      dense.at(split.held_out_classes[i]) = static_cast<Label>(i);
    }
    const std::size_t c25 = split.held_out_classes.size();
    LabelVector y_train, y_test;
    for (Index i : items.train25) y_train.push_back(dense[data.labels[i]]);
    for (Index i : items.test25) y_test.push_back(dense[data.labels[i]]);

    FeatureMatrix x_train = data.features.select_rows(items.train25);
    if (config.codec.kind == CodecKind::kPq) {
      PqTrainParams p;
      p.m = config.codec.m;
      p.ks = config.codec.ks;
      p.seed = fold_seed;
      p.max_train_points = config.pq_max_train;
      const auto codebook = pq_train(data.features.select_rows(items.train75), p);
      x_train = codebook.decode_rows(codebook.encode_rows(x_train));
    }
    const auto train = matrix_cast<double>(x_train);
    const auto test = matrix_cast<double>(data.features.select_rows(items.test25));

    double lambda = config.head.lambda_grid.front();
    if (config.head.lambda_grid.size() > 1) {
      const std::uint64_t cv_seed = derive_seed(fold_seed, 1);
      lambda = cross_validate(train, y_train, config.head.lambda_grid, cv_seed,
                              [&](const Matrix<double>& x, std::span<const Label> y, double l,
                                  const Matrix<double>& holdout) {
                                return fit_and_predict(config.head, c25, x, y, l, cv_seed, holdout);
                              })
                   .chosen_lambda;
    }
    const auto predicted = fit_and_predict(config.head, c25, train, y_train, lambda,
                                           derive_seed(fold_seed, 2), test);
    report.runs.push_back(
        RunRecord{split.fold, 0, classification_accuracy(predicted, y_test), std::nullopt, 0});
  }
  report.finalize();
  report.self_check();
  return report;
}

TransferSweep run_transfer_sweep(const Dataset& data, std::span<const ClassSplit> splits,
                                 const TransferConfig& config,
                                 std::span<const std::size_t> m_values) {
  TransferSweep sweep;
  auto add = [&](const CodecSpec& codec) {
    TransferConfig c = config;
    c.codec = codec;
    sweep.reports.push_back(run_protocol2(data, splits, c));
    const auto bits = codec.code_size_bits();
    const double bytes = bits ? static_cast<double>(*bits) / 8.0
                              : 4.0 * static_cast<double>(data.features.cols());
    sweep.curve.push_back({bytes, sweep.reports.back().mean});
  };
  for (std::size_t m : m_values) {
    CodecSpec codec = config.codec;
    codec.kind = CodecKind::kPq;
    codec.m = m;
    add(codec);
  }
  add(CodecSpec{CodecKind::kNone});
  return sweep;
}

}  // namespace hashbench
