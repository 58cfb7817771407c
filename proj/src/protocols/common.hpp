#pragma once

#include <exception>
#include <vector>

#include "hashbench/metrics.hpp"
#include "hashbench/types.hpp"

namespace hashbench::detail {

/// Runs fn(q) for q in [0, n) in parallel; the first exception thrown by any
/// iteration is rethrown after the loop.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::exception_ptr error;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t q = 0; q < count; ++q) {
    try {
      fn(static_cast<std::size_t>(q));
    } catch (...) {
#pragma omp critical(hashbench_parallel_for_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

/// AP@k for every query, given a ranker producing the top-k prefix.
/// Queries without a correct database item yield nullopt.
template <class Ranker>
MetricResult evaluate_queries(std::span<const Label> query_labels,
                              std::span<const Label> database_labels, std::size_t k,
                              ApNormalizer normalizer, Ranker&& ranker) {
  std::vector<std::optional<double>> aps(query_labels.size());
  parallel_for(query_labels.size(), [&](std::size_t q) {
    const RelevanceJudgment rel{query_labels[q], database_labels};
    if (rel.correct_count() == 0) return;
    const Ranking ranking = ranker(q, k);
    aps[q] = average_precision_at_k(rel, ranking, k, normalizer);
  });
  return summarize_average_precision(aps, k);
}

}  // namespace hashbench::detail
