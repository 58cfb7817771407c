#include <memory>
#include <string>

#include "common.hpp"
#include "hashbench/codecs.hpp"
#include "hashbench/pq.hpp"
#include "hashbench/protocols.hpp"
#include "hashbench/random.hpp"
#include "hashbench/retrieval.hpp"

namespace hashbench {

namespace {

std::vector<double> column_mean(const FeatureMatrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += r[j];
  }
  for (double& v : mean) v /= static_cast<double>(x.rows());
  return mean;
}

}  // namespace

ProtocolReport run_protocol1(const Dataset& data, std::span<const ClassSplit> splits,
                             const UnseenConfig& config) {
  if (data.features.rows() == 0 || data.features.rows() != data.labels.size()) {
    throw ShapeError("Protocol 1 needs one feature row per labeled item");
  }
  if (splits.empty()) throw ConfigError("Protocol 1 needs at least one class split");
  if (config.codec.kind == CodecKind::kLsh && config.similarity == Similarity::kInnerProduct) {
    throw ConfigError("LSH codes are compared by Hamming distance, not inner product");
  }

  ProtocolReport report;
  report.protocol = "unseen";
  report.dataset = data.name;
  report.method = config.codec.label();
  report.metric = "mAP";
  report.code_size_bits = config.codec.code_size_bits();
  report.k = config.map_k;
  report.config = {{"seed", std::to_string(config.seed)},
                   {"similarity", config.similarity == Similarity::kL2 ? "l2" : "ip"},
                   {"test_fraction", std::to_string(config.test_fraction)},
                   {"folds", std::to_string(splits.size())}};

  const auto flags = item_test_flags(data, config.test_fraction, derive_seed(config.seed, 0));

  for (const auto& split : splits) {
    const auto items = split_items(data, split, flags);
    if (items.train25.empty() || items.test25.empty()) {
      throw InsufficientDataError("fold " + std::to_string(split.fold) +
                                  " has an empty train25 or test25 set");
    }
    const FeatureMatrix x25 = data.features.select_rows(items.train25);
    const FeatureMatrix q25 = data.features.select_rows(items.test25);
    LabelVector db_y, q_y;
    for (Index i : items.train25) db_y.push_back(data.labels[i]);
    for (Index i : items.test25) q_y.push_back(data.labels[i]);
    const std::size_t k = config.map_k == 0 ? db_y.size() : std::min(config.map_k, db_y.size());
    const std::uint64_t fold_seed = derive_seed(config.seed, 1 + static_cast<std::uint64_t>(split.fold));

    MetricResult result;
    switch (config.codec.kind) {
      case CodecKind::kNone: {
        const auto db = DatabaseRepresentation::raw_features(x25);
        result = detail::evaluate_queries(q_y, db_y, k, ApNormalizer::kCorrectCount,
                                          [&](std::size_t q, std::size_t lim) {
                                            return config.similarity == Similarity::kL2
                                                       ? rank_l2(q25.row(q), db, lim)
                                                       : rank_inner_product(q25.row(q), db, lim);
                                          });
        break;
      }
      case CodecKind::kPq: {
        PqTrainParams p;
        p.m = config.codec.m;
        p.ks = config.codec.ks;
        p.seed = fold_seed;
        p.max_train_points = config.pq_max_train;
        auto codebook = std::make_shared<const PqCodebook>(
            pq_train(data.features.select_rows(items.train75), p));
        auto codes = codebook->encode_rows(x25);
        if (config.similarity == Similarity::kL2) {
          const auto db = DatabaseRepresentation::pq_codes(codebook, std::move(codes));
          result = detail::evaluate_queries(q_y, db_y, k, ApNormalizer::kCorrectCount,
                                            [&](std::size_t q, std::size_t lim) {
                                              return rank_l2(q25.row(q), db, lim);
                                            });
        } else {
          const auto db = DatabaseRepresentation::raw_features(codebook->decode_rows(codes));
          result = detail::evaluate_queries(q_y, db_y, k, ApNormalizer::kCorrectCount,
                                            [&](std::size_t q, std::size_t lim) {
                                              return rank_inner_product(q25.row(q), db, lim);
                                            });
        }
        break;
      }
      case CodecKind::kLsh: {
        auto frame = TightFrame::create(data.features.cols(), config.codec.bits, fold_seed);
        frame.set_center(column_mean(data.features.select_rows(items.train75)));
        const auto db = DatabaseRepresentation::binary_codes(lsh_encode_rows(frame, x25));
        result = detail::evaluate_queries(q_y, db_y, k, ApNormalizer::kCorrectCount,
                                          [&](std::size_t q, std::size_t lim) {
                                            return rank_hamming(lsh_encode(frame, q25.row(q)), db, lim);
                                          });
        break;
      }
    }
    report.runs.push_back({split.fold, 0, result.value, std::nullopt, result.skipped_queries});
  }
  report.finalize();
  report.self_check();
  return report;
}

}  // namespace hashbench
