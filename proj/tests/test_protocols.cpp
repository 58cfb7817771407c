#include <cmath>
#include <set>
#include <sstream>

#include <doctest.h>

#include "hashbench/error.hpp"
#include "hashbench/random.hpp"
#include "hashbench/protocols.hpp"
#include "hashbench/report.hpp"

using namespace hashbench;

namespace {

Dataset mixture(std::size_t c, std::size_t per_class, std::size_t dim, double separation,
                std::uint64_t seed) {
  SyntheticSpec s;
  s.num_classes = c;
  s.per_class = per_class;
  s.dim = dim;
  s.separation = separation;
  s.seed = seed;
  auto ds = generate_synthetic(s);
  ds.name = "mix";
  return ds;
}

SshConfig small_ssh(std::uint64_t seed) {
  SshConfig c;
  c.h = 60;
  c.queries_per_class = 10;
  c.runs = 2;
  c.seed = seed;
  c.lambda_grid = {1e-3, 1e-1};
  c.max_iter = 200;
  return c;
}

}  // namespace

TEST_CASE("class splits partition the classes into four disjoint quarters") {
  for (std::size_t c : {8, 10, 11, 100}) {
    const auto splits = make_class_splits(c, 3);
    std::multiset<Label> held;
    for (const auto& s : splits) {
      CHECK(s.known_classes.size() + s.held_out_classes.size() == c);
      std::set<Label> known(s.known_classes.begin(), s.known_classes.end());
      for (Label y : s.held_out_classes) {
        CHECK(known.count(y) == 0);
        held.insert(y);
      }
    }
    CHECK(held.size() == c);
    CHECK(std::set<Label>(held.begin(), held.end()).size() == c);
  }
  const auto c100 = make_class_splits(100, 1);
  for (const auto& s : c100) CHECK(s.held_out_classes.size() == 25);
  const auto c8 = make_class_splits(8, 1);
  for (const auto& s : c8) CHECK(s.held_out_classes.size() == 2);
  const auto c10 = make_class_splits(10, 1);
  CHECK(c10[0].held_out_classes.size() == 3);
  CHECK(c10[1].held_out_classes.size() == 3);
  CHECK(c10[2].held_out_classes.size() == 2);
  CHECK(c10[3].held_out_classes.size() == 2);
  CHECK(make_class_splits(100, 1)[2].held_out_classes == c100[2].held_out_classes);
  CHECK_FALSE(make_class_splits(100, 2)[0].held_out_classes == c100[0].held_out_classes);
  CHECK_THROWS_AS(make_class_splits(7, 1), ConfigError);
}

TEST_CASE("split items keep test25 out of the index and classes apart") {
  const auto ds = mixture(12, 30, 4, 3.0, 1);
  const auto flags = item_test_flags(ds, 1.0 / 6.0, 2);
  for (Label c = 0; c < 12; ++c) {
    std::size_t n_test = 0;
    for (std::size_t i = 0; i < ds.labels.size(); ++i) n_test += (ds.labels[i] == c && flags[i]);
    CHECK(n_test == 5);
  }
  const auto splits = make_class_splits(12, 4);
  for (const auto& s : splits) {
    const auto items = split_items(ds, s, flags);
    std::set<Label> c75, c25;
    for (Index i : items.train75) c75.insert(ds.labels[i]);
    for (Index i : items.train25) c25.insert(ds.labels[i]);
    for (Label y : c25) CHECK(c75.count(y) == 0);
    std::set<Index> index(items.train25.begin(), items.train25.end());
    for (Index q : items.test25) CHECK(index.count(q) == 0);
    CHECK(items.train75.size() + items.test75.size() + items.train25.size() + items.test25.size() ==
          ds.labels.size());
  }
}

TEST_CASE("SH: perfect classifier gives mAP 1, one-hot mAP bounds accuracy") {
  const auto easy = mixture(5, 60, 8, 25.0, 3);
  const auto r = run_ssh(easy, small_ssh(1), SshStrategy::kOneHot);
  CHECK(r.code_size_bits == 3u);
  CHECK(r.mean == doctest::Approx(1.0));

  const auto hard = mixture(5, 60, 8, 2.0, 4);
  const auto sh = run_ssh(hard, small_ssh(5), SshStrategy::kOneHot);
  for (const auto& run : sh.runs) {
    CHECK(*run.accuracy < 1.0);
    CHECK(run.value >= *run.accuracy);
  }
}

TEST_CASE("SSH strategies share runs and declare their code sizes") {
  const auto hard = mixture(5, 60, 8, 2.0, 4);
  const SshStrategy all[] = {SshStrategy::kOneHot, SshStrategy::kLsh, SshStrategy::kTopline};
  auto cfg = small_ssh(2);
  cfg.n_label = 100;
  cfg.lsh_bits = 32;
  const auto reports = run_ssh(hard, cfg, all);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].n_label == 100);
  CHECK(reports[1].code_size_bits == 32u);
  CHECK_FALSE(reports[2].code_size_bits.has_value());
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(reports[0].runs[i].accuracy == reports[2].runs[i].accuracy);
  }

  auto bad = small_ssh(1);
  bad.h = 10000;
  CHECK_THROWS_AS(run_ssh(hard, bad, SshStrategy::kOneHot), ConfigError);
  bad = small_ssh(1);
  bad.queries_per_class = 60;
  CHECK_THROWS_AS(run_ssh(hard, bad, SshStrategy::kOneHot), ConfigError);
}

TEST_CASE("report mean/std are recomputable and checked") {
  ProtocolReport r;
  r.runs = {{0, 0, 0.2, {}, 0}, {0, 1, 0.4, {}, 0}, {0, 2, 0.9, {}, 0}};
  r.finalize();
  CHECK(r.mean == doctest::Approx(0.5));
  CHECK(r.stddev == doctest::Approx(std::sqrt((0.09 + 0.01 + 0.16) / 3.0)));
  r.self_check();
  r.mean += 1e-9;
  try {
    r.self_check();
    FAIL("expected an invariant violation");
  } catch (const InvariantViolation& e) {
    CHECK(std::string(e.invariant()) == "report_mean_std_recomputable");
  }
}

TEST_CASE("report CSV round trip and Markdown layout") {
  ProtocolReport a;
  a.protocol = "unseen";
  a.dataset = "mix";
  a.method = "pq(M=4,ks=16)";
  a.metric = "mAP";
  a.code_size_bits = 16;
  a.runs = {{0, 0, 0.25, {}, 0}, {1, 0, 0.5, {}, 1}};
  a.config = {{"seed", "3"}, {"similarity", "l2"}};
  a.finalize();
  ProtocolReport b = a;
  b.protocol = "ssh";
  b.method = "Classifier topline";
  b.code_size_bits.reset();
  b.n_label = 500;
  b.h = 300;
  b.runs = {{0, 0, 0.5, 0.6, 0}};
  b.finalize();
  const std::vector<ProtocolReport> reports = {a, b};
  std::stringstream csv;
  write_report_csv(csv, reports);
  const std::string text = csv.str();
  std::stringstream in(text);
  const auto back = read_report_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].method == a.method);
  CHECK(back[0].runs.size() == 2);
  CHECK(back[0].runs[1].skipped_queries == 1);
  CHECK(back[0].config == a.config);
  CHECK(back[1].runs[0].accuracy == doctest::Approx(0.6));
  CHECK_FALSE(back[1].code_size_bits.has_value());
  std::stringstream again;
  write_report_csv(again, back);
  CHECK(again.str() == text);

  std::stringstream md;
  write_markdown_table(md, reports);
  CHECK(md.str().find("| mix | - | - | pq(M=4,ks=16) | 16 | 37.5 ± 12.5 |") != std::string::npos);
  CHECK(md.str().find("| mix | 500 | 300 | Classifier topline | - | 50.0 ± 0.0 |") != std::string::npos);

  std::stringstream broken("protocol,dataset\n");
  CHECK_THROWS_AS(read_report_csv(broken), FormatError);
}

TEST_CASE("Protocol 1 on well-separated classes and codec checks") {
  const auto ds = mixture(12, 40, 16, 10.0, 5);
  const auto splits = make_class_splits(12, 6);
  UnseenConfig cfg;
  cfg.seed = 7;
  const auto raw = run_protocol1(ds, splits, cfg);
  CHECK(raw.runs.size() == 4);
  CHECK(raw.mean >= 0.95);
  CHECK_FALSE(raw.code_size_bits.has_value());

  cfg.codec = {CodecKind::kPq, 4, 16, 64};
  const auto pq = run_protocol1(ds, splits, cfg);
  CHECK(pq.code_size_bits == 16u);
  CHECK(pq.method == "pq(M=4,ks=16)");

  cfg.codec = {CodecKind::kLsh, 8, 256, 64};
  const auto lsh = run_protocol1(ds, splits, cfg);
  CHECK(lsh.code_size_bits == 64u);
  cfg.similarity = Similarity::kInnerProduct;
  CHECK_THROWS_AS(run_protocol1(ds, splits, cfg), ConfigError);
}

TEST_CASE("Protocol 2 without a codec equals direct training; LSH is rejected") {
  const auto ds = mixture(8, 30, 8, 4.0, 8);
  const auto splits = make_class_splits(8, 9);
  TransferConfig cfg;
  cfg.seed = 1;
  cfg.head.lambda_grid = {1e-2};
  const auto r = run_protocol2(ds, splits, cfg);
  CHECK(r.metric == "accuracy");
  REQUIRE(r.runs.size() == 4);

  // Reproduce fold 0 by hand on raw features.
  const auto flags = item_test_flags(ds, cfg.test_fraction, derive_seed(cfg.seed, 0));
  const auto items = split_items(ds, splits[0], flags);
  std::vector<Label> dense(8, -1);
  for (std::size_t i = 0; i < splits[0].held_out_classes.size(); ++i) {
    dense[splits[0].held_out_classes[i]] = static_cast<Label>(i);
  }
  LabelVector ytr, yte;
  for (Index i : items.train25) ytr.push_back(dense[ds.labels[i]]);
  for (Index i : items.test25) yte.push_back(dense[ds.labels[i]]);
  SoftmaxTrainParams p;
  p.lambda = 1e-2;
  p.max_iter = cfg.head.max_iter;
  const auto model = train_softmax(matrix_cast<double>(ds.features.select_rows(items.train25)), ytr,
                                   splits[0].held_out_classes.size(), p);
  const double direct =
      classification_accuracy(model.predict(matrix_cast<double>(ds.features.select_rows(items.test25))), yte);
  CHECK(r.runs[0].value == direct);

  cfg.codec = {CodecKind::kLsh, 8, 256, 64};
  CHECK_THROWS_AS(run_protocol2(ds, splits, cfg), UnsupportedCodecError);

  cfg.codec = {CodecKind::kPq, 2, 16, 64};
  cfg.head.kind = HeadKind::kMlp;
  cfg.head.hidden = 16;
  cfg.head.max_iter = 100;
  const auto sweep_m = std::vector<std::size_t>{1, 2};
  cfg.head.kind = HeadKind::kSoftmax;
  const auto sweep = run_transfer_sweep(ds, splits, cfg, sweep_m);
  REQUIRE(sweep.curve.size() == 3);
  CHECK(sweep.curve[0].bytes_per_image == 0.5);
  CHECK(sweep.curve[1].bytes_per_image == 1.0);
  CHECK(sweep.curve[2].bytes_per_image == 32.0);
}
