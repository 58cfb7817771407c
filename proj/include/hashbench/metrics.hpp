#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hashbench/types.hpp"

namespace hashbench {

/// Ground truth for one query: an item i is correct iff
/// database_labels[i] == query_label.
struct RelevanceJudgment {
  Label query_label = 0;
  std::span<const Label> database_labels;

  std::size_t database_size() const noexcept { return database_labels.size(); }
  /// Number of correct items in the whole database.
  std::size_t correct_count() const noexcept;
};

/// Normalizer of AP@k. kCorrectCount divides by the number of correct items
/// in the full database; kTruncated divides by min(correct, k), the variant
/// some evaluations use. The default is what the protocols report.
enum class ApNormalizer { kCorrectCount, kTruncated };

struct MetricResult {
  double value = 0.0;
  std::size_t k = 0;
  std::vector<double> per_query;
  /// Queries excluded from the mean because they have no correct item.
  std::size_t skipped_queries = 0;
};

double precision_at_k(const RelevanceJudgment& rel, std::span<const Index> ranking, std::size_t k);

/// Throws UndefinedApError when the query has no correct item.
double average_precision_at_k(const RelevanceJudgment& rel, std::span<const Index> ranking,
                              std::size_t k,
                              ApNormalizer normalizer = ApNormalizer::kCorrectCount);

/// Mean AP@k over queries. Queries with no correct item are skipped and
/// counted; per-query APs may be computed in parallel but the mean is
/// summed in query order.
MetricResult mean_average_precision(std::span<const RelevanceJudgment> rels,
                                    std::span<const Ranking> rankings, std::size_t k,
                                    ApNormalizer normalizer = ApNormalizer::kCorrectCount);

/// Mean of already-computed per-query APs; nullopt entries are skipped.
MetricResult summarize_average_precision(std::span<const std::optional<double>> per_query,
                                         std::size_t k);

double classification_accuracy(std::span<const Label> predicted, std::span<const Label> truth);

}  // namespace hashbench
