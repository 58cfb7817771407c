#include "hashbench/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hashbench/kernels.hpp"

namespace hashbench {

namespace {

std::size_t effective_limit(std::size_t n, std::size_t limit) {
  return limit == 0 || limit > n ? n : limit;
}

void require(bool ok, const char* what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace

DatabaseRepresentation DatabaseRepresentation::onehot_labels(LabelVector labels,
                                                             std::size_t num_classes) {
  OneHot p;
  p.num_classes = num_classes;
  p.inverted.resize(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw RangeError("one-hot database label " + std::to_string(y) + " outside [0, C)");
    }
    p.inverted[y].push_back(static_cast<Index>(i));
  }
  p.labels = std::move(labels);
  return DatabaseRepresentation(std::move(p));
}

DatabaseRepresentation DatabaseRepresentation::probability_vectors(ProbabilityMatrix u) {
  for (std::size_t i = 0; i < u.rows(); ++i) {
    double s = 0.0;
    for (double v : u.row(i)) {
      if (!(v >= 0.0)) throw RangeError("probability database has a negative or NaN entry");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-6) throw RangeError("probability database row does not sum to 1");
  }
  return DatabaseRepresentation(std::move(u));
}

DatabaseRepresentation DatabaseRepresentation::topline(std::span<const Label> labels,
                                                       const ProbabilityMatrix& posteriors) {
  require(labels.size() == posteriors.rows(), "topline: labels vs posterior rows");
  ProbabilityMatrix u = posteriors;
  const std::size_t c = posteriors.cols();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    if (static_cast<std::size_t>(labels[i]) >= c) throw RangeError("topline: label outside [0, C)");
    auto row = u.row(i);
    std::fill(row.begin(), row.end(), 0.0);
    row[labels[i]] = 1.0;
  }
  return probability_vectors(std::move(u));
}

DatabaseRepresentation DatabaseRepresentation::binary_codes(BinaryCodeMatrix codes) {
  require(codes.data.size() == codes.count * codes.code_bytes(), "binary database payload size");
  return DatabaseRepresentation(std::move(codes));
}

DatabaseRepresentation DatabaseRepresentation::pq_codes(std::shared_ptr<const PqCodebook> codebook,
                                                        PqCodeMatrix codes) {
  require(codebook != nullptr, "pq database without codebook");
  require(codes.m == codebook->m() && codes.data.size() == codes.count * codes.m,
          "pq database payload does not match codebook");
  for (auto v : codes.data) {
    if (v >= codebook->ks()) throw CorruptionError("pq database code index >= ks");
  }
  return DatabaseRepresentation(Pq{std::move(codebook), std::move(codes)});
}

DatabaseRepresentation DatabaseRepresentation::raw_features(FeatureMatrix features) {
  return DatabaseRepresentation(std::move(features));
}

DatabaseKind DatabaseRepresentation::kind() const noexcept {
  return static_cast<DatabaseKind>(payload_.index());
}

std::size_t DatabaseRepresentation::size() const noexcept {
  struct Visitor {
    std::size_t operator()(const OneHot& p) const { return p.labels.size(); }
    std::size_t operator()(const ProbabilityMatrix& p) const { return p.rows(); }
    std::size_t operator()(const BinaryCodeMatrix& p) const { return p.count; }
    std::size_t operator()(const Pq& p) const { return p.codes.count; }
    std::size_t operator()(const FeatureMatrix& p) const { return p.rows(); }
  };
  return std::visit(Visitor{}, payload_);
}

std::optional<std::size_t> DatabaseRepresentation::code_size_bits() const {
  switch (kind()) {
    case DatabaseKind::kOneHotLabels: return onehot_code_bits(onehot().num_classes);
    case DatabaseKind::kBinaryCodes: return binary().bits;
    case DatabaseKind::kPqCodes: return pq().codebook->code_size_bits();
    default: return std::nullopt;
  }
}

const DatabaseRepresentation::OneHot& DatabaseRepresentation::onehot() const {
  if (auto* p = std::get_if<OneHot>(&payload_)) return *p;
  throw ShapeError("database does not hold one-hot labels");
}
const ProbabilityMatrix& DatabaseRepresentation::probabilities() const {
  if (auto* p = std::get_if<ProbabilityMatrix>(&payload_)) return *p;
  throw ShapeError("database does not hold probability vectors");
}
const BinaryCodeMatrix& DatabaseRepresentation::binary() const {
  if (auto* p = std::get_if<BinaryCodeMatrix>(&payload_)) return *p;
  throw ShapeError("database does not hold binary codes");
}
const DatabaseRepresentation::Pq& DatabaseRepresentation::pq() const {
  if (auto* p = std::get_if<Pq>(&payload_)) return *p;
  throw ShapeError("database does not hold PQ codes");
}
const FeatureMatrix& DatabaseRepresentation::features() const {
  if (auto* p = std::get_if<FeatureMatrix>(&payload_)) return *p;
  throw ShapeError("database does not hold raw features");
}

Ranking rank_by_score(std::span<const double> scores, ScoreOrder order, std::size_t limit) {
  const std::size_t n = scores.size();
  for (double s : scores) {
    if (std::isnan(s)) throw RangeError("NaN score in ranking");
  }
  Ranking idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});
  auto before = [&](Index a, Index b) {
    if (scores[a] != scores[b]) {
      return order == ScoreOrder::kDescending ? scores[a] > scores[b] : scores[a] < scores[b];
    }
    return a < b;
  };
  const std::size_t k = effective_limit(n, limit);
  if (k < n) {
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), before);
    idx.resize(k);
  } else {
    std::sort(idx.begin(), idx.end(), before);
  }
  return idx;
}

Ranking rank_topline(std::span<const double> query_posterior, const DatabaseRepresentation& db,
                     std::size_t limit) {
  std::vector<double> scores(db.size());
  if (db.kind() == DatabaseKind::kOneHotLabels) {
    const auto& p = db.onehot();
    require(query_posterior.size() == p.num_classes, "topline: query posterior vs C");
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = query_posterior[p.labels[i]];
  } else if (db.kind() == DatabaseKind::kProbabilityVectors) {
    const auto& u = db.probabilities();
    require(query_posterior.size() == u.cols(), "topline: query posterior vs C");
    kernels::inner_product_scan(u, query_posterior, scores);
  } else {
    throw ShapeError("rank_topline needs one-hot or probability database");
  }
  return rank_by_score(scores, ScoreOrder::kDescending, limit);
}

Ranking rank_onehot(std::span<const double> query_posterior, const DatabaseRepresentation& db,
                    std::size_t limit) {
  const auto& p = db.onehot();
  require(query_posterior.size() == p.num_classes, "rank_onehot: query posterior vs C");
  for (double v : query_posterior) {
    if (std::isnan(v)) throw RangeError("NaN in query posterior");
  }
  std::vector<Index> classes(p.num_classes);
  std::iota(classes.begin(), classes.end(), Index{0});
  std::stable_sort(classes.begin(), classes.end(), [&](Index a, Index b) {
    return query_posterior[a] > query_posterior[b];
  });
  const std::size_t k = effective_limit(p.labels.size(), limit);
  Ranking out;
  out.reserve(k);
  for (Index c : classes) {
    for (Index i : p.inverted[c]) {
      if (out.size() == k) return out;
      out.push_back(i);
    }
  }
  return out;
}

Ranking rank_hamming(const BinaryCode& query_code, const DatabaseRepresentation& db,
                     std::size_t limit) {
  const auto& codes = db.binary();
  if (query_code.size() != codes.bits) {
    throw ShapeError("rank_hamming: query has " + std::to_string(query_code.size()) +
                     " bits, database " + std::to_string(codes.bits));
  }
  std::vector<std::uint32_t> dist(codes.count);
  kernels::hamming_scan(codes.data, codes.code_bytes(), query_code.bytes(), dist);
  // Counting sort over the bits+1 possible distances keeps index order inside a bucket.
  std::vector<std::size_t> start(codes.bits + 2, 0);
  for (auto d : dist) ++start[d + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  Ranking out(codes.count);
  for (std::size_t i = 0; i < dist.size(); ++i) out[start[dist[i]]++] = static_cast<Index>(i);
  out.resize(effective_limit(codes.count, limit));
  return out;
}

Ranking rank_l2(std::span<const float> query, const DatabaseRepresentation& db, std::size_t limit) {
  std::vector<double> scores(db.size());
  if (db.kind() == DatabaseKind::kRawFeatures) {
    const auto& x = db.features();
    require(query.size() == x.cols(), "rank_l2: query dimension mismatch");
    kernels::squared_l2_scan(x, query, scores);
  } else if (db.kind() == DatabaseKind::kPqCodes) {
    const auto& p = db.pq();
    const auto table = p.codebook->distance_table(query);
    kernels::adc_scan(table, p.codebook->m(), p.codebook->ks(), p.codes.data, scores);
  } else {
    throw ShapeError("rank_l2 needs raw features or PQ codes");
  }
  return rank_by_score(scores, ScoreOrder::kAscending, limit);
}

Ranking rank_inner_product(std::span<const float> query, const DatabaseRepresentation& db,
                           std::size_t limit) {
  const auto& x = db.features();
  require(query.size() == x.cols(), "rank_inner_product: query dimension mismatch");
  std::vector<double> scores(db.size());
  kernels::inner_product_scan(x, query, scores);
  return rank_by_score(scores, ScoreOrder::kDescending, limit);
}

}  // namespace hashbench
