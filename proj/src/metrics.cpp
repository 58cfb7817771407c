#include "hashbench/metrics.hpp"

#include <algorithm>
#include <exception>
#include <string>

namespace hashbench {

namespace {

void validate_prefix(const RelevanceJudgment& rel, std::span<const Index> ranking, std::size_t k) {
  const std::size_t n = rel.database_size();
  if (n == 0) throw RangeError("empty database");
  if (k < 1 || k > n) {
    throw RangeError("rank cutoff k=" + std::to_string(k) + " outside [1, " + std::to_string(n) +
                     "]");
  }
  if (ranking.size() < k) {
    throw RangeError("ranking has " + std::to_string(ranking.size()) + " items, k=" +
                     std::to_string(k));
  }
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < k; ++i) {
    const Index id = ranking[i];
    if (id >= n) throw RangeError("ranking index " + std::to_string(id) + " >= N");
    if (seen[id]) throw RangeError("duplicate index " + std::to_string(id) + " in ranking");
    seen[id] = true;
  }
}

}  // namespace

std::size_t RelevanceJudgment::correct_count() const noexcept {
  return static_cast<std::size_t>(
      std::count(database_labels.begin(), database_labels.end(), query_label));
}

double precision_at_k(const RelevanceJudgment& rel, std::span<const Index> ranking, std::size_t k) {
  validate_prefix(rel, ranking, k);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += rel.database_labels[ranking[i]] == rel.query_label;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision_at_k(const RelevanceJudgment& rel, std::span<const Index> ranking,
                              std::size_t k, ApNormalizer normalizer) {
  validate_prefix(rel, ranking, k);
  const std::size_t correct = rel.correct_count();
  if (correct == 0) throw UndefinedApError("query has no correct item in the database");
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (rel.database_labels[ranking[i]] != rel.query_label) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  const std::size_t denom =
      normalizer == ApNormalizer::kTruncated ? std::min(correct, k) : correct;
  return sum / static_cast<double>(denom);
}

MetricResult summarize_average_precision(std::span<const std::optional<double>> per_query,
                                         std::size_t k) {
  MetricResult out;
  out.k = k;
  out.per_query.reserve(per_query.size());
  double sum = 0.0;
  for (const auto& ap : per_query) {
    if (!ap) {
      ++out.skipped_queries;
      continue;
    }
    out.per_query.push_back(*ap);
    sum += *ap;
  }
  out.value = out.per_query.empty() ? 0.0 : sum / static_cast<double>(out.per_query.size());
  return out;
}

MetricResult mean_average_precision(std::span<const RelevanceJudgment> rels,
                                    std::span<const Ranking> rankings, std::size_t k,
                                    ApNormalizer normalizer) {
  if (rels.size() != rankings.size()) {
    throw ShapeError("mAP: " + std::to_string(rels.size()) + " judgments vs " +
                     std::to_string(rankings.size()) + " rankings");
  }
  std::vector<std::optional<double>> aps(rels.size());
  const auto n = static_cast<std::ptrdiff_t>(rels.size());
  // Exceptions may not cross the parallel region; the first error is rethrown.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t q = 0; q < n; ++q) {
    try {
      if (rels[q].correct_count() > 0) {
        aps[q] = average_precision_at_k(rels[q], rankings[q], k, normalizer);
      }
    } catch (...) {
#pragma omp critical(hashbench_map_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return summarize_average_precision(aps, k);
}

double classification_accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size()) {
    throw ShapeError("accuracy: " + std::to_string(predicted.size()) + " predictions vs " +
                     std::to_string(truth.size()) + " labels");
  }
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace hashbench
