#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "hashbench/codecs.hpp"
#include "hashbench/pq.hpp"
#include "hashbench/types.hpp"

namespace hashbench {

enum class DatabaseKind { kOneHotLabels, kProbabilityVectors, kBinaryCodes, kPqCodes, kRawFeatures };

/// What is stored for every indexed item. Read-only once built, so one
/// instance may serve concurrent queries.
class DatabaseRepresentation {
 public:
  struct OneHot {
    LabelVector labels;
    std::size_t num_classes = 0;
    /// Items of each class in ascending index order.
    std::vector<std::vector<Index>> inverted;
  };
  struct Pq {
    std::shared_ptr<const PqCodebook> codebook;
    PqCodeMatrix codes;
  };

  /// One class index per item, stored on ceil(log2 C) bits.
  static DatabaseRepresentation onehot_labels(LabelVector labels, std::size_t num_classes);
  /// u(x) rows; must be non-negative rows summing to 1.
  static DatabaseRepresentation probability_vectors(ProbabilityMatrix u);
  /// Mixed database: u(x) is the one-hot vector of labels[i] when
  /// labels[i] >= 0 (a labeled item) and posteriors row i otherwise.
  static DatabaseRepresentation topline(std::span<const Label> labels,
                                        const ProbabilityMatrix& posteriors);
  static DatabaseRepresentation binary_codes(BinaryCodeMatrix codes);
  static DatabaseRepresentation pq_codes(std::shared_ptr<const PqCodebook> codebook,
                                         PqCodeMatrix codes);
  static DatabaseRepresentation raw_features(FeatureMatrix features);

  DatabaseKind kind() const noexcept;
  std::size_t size() const noexcept;
  /// Bits per stored item; nullopt for uncompressed payloads.
  std::optional<std::size_t> code_size_bits() const;

  const OneHot& onehot() const;
  const ProbabilityMatrix& probabilities() const;
  const BinaryCodeMatrix& binary() const;
  const Pq& pq() const;
  const FeatureMatrix& features() const;

 private:
  using Payload = std::variant<OneHot, ProbabilityMatrix, BinaryCodeMatrix, Pq, FeatureMatrix>;
  explicit DatabaseRepresentation(Payload p) : payload_(std::move(p)) {}
  Payload payload_;
};

enum class ScoreOrder { kDescending, kAscending };

/// Indices sorted by score (in `order`), ties by ascending index; the first
/// `limit` of them when 0 < limit < N.
Ranking rank_by_score(std::span<const double> scores, ScoreOrder order, std::size_t limit = 0);

/// Descending <P(.|q), u(x)>. Accepts one-hot and probability databases.
Ranking rank_topline(std::span<const double> query_posterior, const DatabaseRepresentation& db,
                     std::size_t limit = 0);

/// Classes in descending query posterior (ties: lower class first), each
/// class's items in ascending index. Equal to rank_topline whenever the
/// query posterior has no tied entries.
Ranking rank_onehot(std::span<const double> query_posterior, const DatabaseRepresentation& db,
                    std::size_t limit = 0);

/// Ascending Hamming distance, ties by index.
Ranking rank_hamming(const BinaryCode& query_code, const DatabaseRepresentation& db,
                     std::size_t limit = 0);

/// Ascending squared L2 over raw features, or asymmetric distance over PQ codes.
Ranking rank_l2(std::span<const float> query, const DatabaseRepresentation& db,
                std::size_t limit = 0);

/// Descending dot product over raw features.
Ranking rank_inner_product(std::span<const float> query, const DatabaseRepresentation& db,
                           std::size_t limit = 0);

}  // namespace hashbench
