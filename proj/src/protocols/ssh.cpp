#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "common.hpp"
#include "hashbench/codecs.hpp"
#include "hashbench/protocols.hpp"
#include "hashbench/random.hpp"
#include "hashbench/retrieval.hpp"

namespace hashbench {

namespace {

struct QuerySplit {
  std::vector<Index> queries;
  std::vector<Index> database;
};

std::vector<std::vector<Index>> items_by_class(std::span<const Label> labels, std::size_t c,
                                               std::span<const Index> subset) {
  std::vector<std::vector<Index>> out(c);
  for (Index i : subset) out[labels[i]].push_back(i);
  return out;
}

QuerySplit sample_queries(const Dataset& data, std::size_t per_class, Rng& rng) {
  QuerySplit s;
  if (!data.is_test.empty()) {
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      (data.is_test[i] ? s.queries : s.database).push_back(static_cast<Index>(i));
    }
    return s;
  }
  std::vector<Index> all(data.labels.size());
  std::iota(all.begin(), all.end(), Index{0});
  auto by_class = items_by_class(data.labels, data.num_classes, all);
  std::vector<bool> is_query(data.labels.size(), false);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& items = by_class[c];
    if (items.size() <= per_class) {
      throw ConfigError("class " + std::to_string(c) + " has " + std::to_string(items.size()) +
                        " items, cannot hold out " + std::to_string(per_class) +
                        " queries and keep it in the database");
    }
    std::shuffle(items.begin(), items.end(), rng);
    for (std::size_t i = 0; i < per_class; ++i) is_query[items[i]] = true;
  }
  for (std::size_t i = 0; i < is_query.size(); ++i) {
    (is_query[i] ? s.queries : s.database).push_back(static_cast<Index>(i));
  }
  return s;
}

/// Positions (into the database list) of the labeled items: round-robin over
/// classes so the subset is class-balanced whenever every class has enough
/// items.
std::vector<Index> sample_labeled(std::span<const Label> db_labels, std::size_t num_classes,
                                  std::size_t n_label, Rng& rng) {
  std::vector<Index> positions(db_labels.size());
  std::iota(positions.begin(), positions.end(), Index{0});
  if (n_label == 0 || n_label >= db_labels.size()) return positions;
  auto by_class = items_by_class(db_labels, num_classes, positions);
  for (auto& items : by_class) std::shuffle(items.begin(), items.end(), rng);
  std::vector<Index> out;
  out.reserve(n_label);
  for (std::size_t round = 0; out.size() < n_label; ++round) {
    for (const auto& items : by_class) {
      if (round < items.size() && out.size() < n_label) out.push_back(items[round]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_posteriors(const ProbabilityMatrix& p) {
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double s = 0.0;
    for (double v : p.row(i)) {
      check_invariant(v > 0.0 && v <= 1.0, "posterior_strictly_positive");
      s += v;
    }
    check_invariant(std::abs(s - 1.0) <= 1e-9, "posterior_rows_sum_to_one",
                    "row " + std::to_string(i) + " sums to " + std::to_string(s));
  }
}

std::string method_name(SshStrategy s) {
  switch (s) {
    case SshStrategy::kOneHot: return "Classifier+one-hot";
    case SshStrategy::kLsh: return "Classifier+LSH";
    case SshStrategy::kTopline: return "Classifier topline";
  }
  return "unknown";
}

}  // namespace

std::string to_string(SshStrategy s) {
  switch (s) {
    case SshStrategy::kOneHot: return "onehot";
    case SshStrategy::kLsh: return "lsh";
    case SshStrategy::kTopline: return "topline";
  }
  return "unknown";
}

std::vector<ProtocolReport> run_ssh(const Dataset& data, const SshConfig& config,
                                    std::span<const SshStrategy> strategies) {
  const std::size_t c = data.num_classes;
  if (c < 2) throw ConfigError("SSH needs at least two classes");
  if (data.labels.size() != data.features.rows()) throw ShapeError("dataset rows vs labels");
  if (config.runs == 0) throw ConfigError("SSH needs at least one run");
  if (config.h == 0) throw ConfigError("SSH needs h >= 1 anchors");
  if (config.lambda_grid.empty()) throw ConfigError("empty lambda grid");
  if (strategies.empty()) throw ConfigError("no SSH strategy selected");

  std::vector<ProtocolReport> reports(strategies.size());
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    auto& r = reports[s];
    r.protocol = "ssh";
    r.dataset = data.name;
    r.method = method_name(strategies[s]);
    r.metric = "mAP";
    r.h = config.h;
    switch (strategies[s]) {
      case SshStrategy::kOneHot: r.code_size_bits = onehot_code_bits(c); break;
      case SshStrategy::kLsh: r.code_size_bits = config.lsh_bits; break;
      case SshStrategy::kTopline: r.code_size_bits = std::nullopt; break;
    }
    r.config = {{"strategy", to_string(strategies[s])},
                {"seed", std::to_string(config.seed)},
                {"runs", std::to_string(config.runs)},
                {"queries_per_class", std::to_string(config.queries_per_class)},
                {"lsh_center", config.lsh_center ? "on" : "off"},
                {"normalizer", config.normalizer == ApNormalizer::kTruncated ? "min(cl,k)" : "cl"}};
  }

  for (std::size_t run = 0; run < config.runs; ++run) {
    const std::uint64_t run_seed = derive_seed(config.seed, run);
    Rng rng = make_rng(run_seed);
    const auto split = sample_queries(data, config.queries_per_class, rng);
    if (split.queries.empty() || split.database.empty()) {
      throw ConfigError("SSH needs a non-empty query set and database");
    }

    const FeatureMatrix db_x = data.features.select_rows(split.database);
    const FeatureMatrix q_x = data.features.select_rows(split.queries);
    LabelVector db_y, q_y;
    for (Index i : split.database) db_y.push_back(data.labels[i]);
    for (Index i : split.queries) q_y.push_back(data.labels[i]);

    const auto labeled = sample_labeled(db_y, c, config.n_label, rng);
    if (config.h > labeled.size()) {
      throw ConfigError("h=" + std::to_string(config.h) + " exceeds the " +
                        std::to_string(labeled.size()) + " labeled items");
    }
    LabelVector lab_y;
    for (Index p : labeled) lab_y.push_back(db_y[p]);

    const auto anchors =
        fit_anchor_map(db_x.select_rows(labeled), db_x, config.h, derive_seed(run_seed, 1));
    const auto g_db = anchors.apply_rows(db_x);
    const auto g_q = anchors.apply_rows(q_x);
    const auto g_lab = g_db.select_rows(labeled);

    SoftmaxTrainParams tp;
    tp.seed = run_seed;
    tp.max_iter = config.max_iter;
    tp.lambda = config.lambda_grid.front();
    if (config.lambda_grid.size() > 1) {
      tp.lambda = cross_validate_lambda(g_lab, lab_y, c, config.lambda_grid,
                                        derive_seed(run_seed, 2), tp)
                      .chosen_lambda;
    }
    const auto model = train_softmax(g_lab, lab_y, c, tp);
    const auto p_db = model.predict_proba(g_db);
    const auto p_q = model.predict_proba(g_q);
    check_posteriors(p_db);
    check_posteriors(p_q);
    const double accuracy = classification_accuracy(argmax_rows(p_q), q_y);

    // u(x): one-hot of the true label for labeled items, posterior otherwise.
    LabelVector known(db_y.size(), -1);
    for (Index p : labeled) known[p] = db_y[p];
    const std::size_t k = config.map_k == 0 ? db_y.size() : std::min(config.map_k, db_y.size());

    for (std::size_t s = 0; s < strategies.size(); ++s) {
      MetricResult result;
      switch (strategies[s]) {
        case SshStrategy::kOneHot: {
          LabelVector stored = known;
          const auto pred_db = argmax_rows(p_db);
          for (std::size_t i = 0; i < stored.size(); ++i) {
            if (stored[i] < 0) stored[i] = pred_db[i];
          }
          const auto db = DatabaseRepresentation::onehot_labels(std::move(stored), c);
          result = detail::evaluate_queries(q_y, db_y, k, config.normalizer,
                                            [&](std::size_t q, std::size_t lim) {
                                              return rank_onehot(p_q.row(q), db, lim);
                                            });
          break;
        }
        case SshStrategy::kTopline: {
          const auto db = DatabaseRepresentation::topline(known, p_db);
          result = detail::evaluate_queries(q_y, db_y, k, config.normalizer,
                                            [&](std::size_t q, std::size_t lim) {
                                              return rank_topline(p_q.row(q), db, lim);
                                            });
          break;
        }
        case SshStrategy::kLsh: {
          auto frame = TightFrame::create(c, config.lsh_bits, derive_seed(run_seed, 3));
          if (config.lsh_center) frame.set_center(std::vector<double>(c, 1.0 / static_cast<double>(c)));
          const auto u = DatabaseRepresentation::topline(known, p_db);
          const auto db = DatabaseRepresentation::binary_codes(lsh_encode_rows(frame, u.probabilities()));
          result = detail::evaluate_queries(q_y, db_y, k, config.normalizer,
                                            [&](std::size_t q, std::size_t lim) {
                                              return rank_hamming(lsh_encode(frame, p_q.row(q)), db, lim);
                                            });
          break;
        }
      }
      auto& rep = reports[s];
      rep.n_label = labeled.size();
      rep.k = config.map_k == 0 ? 0 : k;
      rep.runs.push_back({0, static_cast<int>(run), result.value, accuracy, result.skipped_queries});
    }
  }
  for (auto& r : reports) {
    r.finalize();
    r.self_check();
  }
  return reports;
}

ProtocolReport run_ssh(const Dataset& data, const SshConfig& config, SshStrategy strategy) {
  const SshStrategy one[] = {strategy};
  return run_ssh(data, config, one).front();
}

}  // namespace hashbench
