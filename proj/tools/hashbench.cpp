// hashbench: batch front end for the hashing baselines and evaluation
// protocols. Every subcommand that draws random numbers requires --seed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hashbench/classifier.hpp"
#include "hashbench/codecs.hpp"
#include "hashbench/container.hpp"
#include "hashbench/dataio.hpp"
#include "hashbench/error.hpp"
#include "hashbench/parallel.hpp"
#include "hashbench/pq.hpp"
#include "hashbench/protocols.hpp"
#include "hashbench/random.hpp"
#include "hashbench/report.hpp"

namespace hb = hashbench;

namespace {

struct Output {
  std::string csv;
  std::string markdown;
};

void add_output_flags(CLI::App* cmd, Output& out) {
  cmd->add_option("--out", out.csv, "Report CSV path (stdout when omitted)");
  cmd->add_option("--markdown", out.markdown, "Markdown table path");
}

void write_to(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw hb::ConfigError("cannot write " + path);
  f << text;
  if (!f) throw hb::ConfigError("write failed: " + path);
}

void emit(const Output& out, const std::vector<hb::ProtocolReport>& reports) {
  std::ostringstream csv;
  hb::write_report_csv(csv, reports);
  write_to(out.csv, csv.str());
  if (!out.markdown.empty()) {
    std::ostringstream md;
    hb::write_markdown_table(md, reports);
    write_to(out.markdown, md.str());
  }
}

hb::Dataset open_dataset(const std::string& manifest) {
  return hb::load_dataset(hb::read_manifest(manifest));
}

hb::CodecKind parse_codec(const std::string& s) {
  if (s == "none") return hb::CodecKind::kNone;
  if (s == "pq") return hb::CodecKind::kPq;
  if (s == "lsh") return hb::CodecKind::kLsh;
  throw hb::ConfigError("unknown codec '" + s + "' (expected none, pq or lsh)");
}

std::vector<hb::SshStrategy> parse_strategies(const std::vector<std::string>& names) {
  std::vector<hb::SshStrategy> out;
  for (const auto& n : names) {
    if (n == "onehot") out.push_back(hb::SshStrategy::kOneHot);
    else if (n == "lsh") out.push_back(hb::SshStrategy::kLsh);
    else if (n == "topline") out.push_back(hb::SshStrategy::kTopline);
    else if (n == "all") {
      out.insert(out.end(), {hb::SshStrategy::kOneHot, hb::SshStrategy::kLsh,
                             hb::SshStrategy::kTopline});
    } else {
      throw hb::ConfigError("unknown strategy '" + n + "' (expected onehot, lsh, topline or all)");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supervised hashing baselines and retrieval/transfer evaluation protocols"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "hashbench 1.0.0");
  int threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (0 = runtime default)")
      ->envname("HASHBENCH_THREADS")
      ->check(CLI::NonNegativeNumber);

  // gen-synthetic
  hb::SyntheticSpec syn;
  std::string syn_dir = ".";
  std::string syn_name = "synthetic";
  std::uint64_t syn_seed = 0;
  auto* gen = app.add_subcommand("gen-synthetic", "Write a seeded Gaussian-mixture dataset");
  gen->add_option("--classes", syn.num_classes, "Number of classes")->check(CLI::PositiveNumber);
  gen->add_option("--per-class", syn.per_class, "Items per class")->check(CLI::PositiveNumber);
  gen->add_option("--dim", syn.dim, "Feature dimension")->check(CLI::PositiveNumber);
  gen->add_option("--separation", syn.separation, "Center separation in units of sigma");
  gen->add_option("--sigma", syn.sigma_w, "Within-class standard deviation");
  gen->add_option("--name", syn_name, "Dataset name (file stem)");
  gen->add_option("--out-dir", syn_dir, "Output directory");
  gen->add_option("--seed", syn_seed, "Random seed")->required();

  // train-classifier
  std::string tc_manifest, tc_model, tc_cv;
  std::size_t tc_h = 1000, tc_nlabel = 0;
  std::vector<double> tc_grid = hb::default_lambda_grid();
  std::uint64_t tc_seed = 0;
  auto* train = app.add_subcommand("train-classifier",
                                   "Fit Gaussian anchors and a softmax classifier with lambda CV");
  train->add_option("--manifest", tc_manifest, "Dataset manifest")->required();
  train->add_option("--anchors", tc_h, "Number of anchors")->check(CLI::PositiveNumber);
  train->add_option("--n-label", tc_nlabel, "Labeled items drawn from the data (0 = all)");
  train->add_option("--lambda-grid", tc_grid, "Regularization grid")->delimiter(',');
  train->add_option("--model", tc_model, "Output model file")->required();
  train->add_option("--cv-report", tc_cv, "CV report CSV (stdout when omitted)");
  train->add_option("--seed", tc_seed, "Random seed")->required();

  // encode
  std::string en_manifest, en_codec = "pq", en_out, en_model;
  hb::CodecSpec en_spec;
  std::uint64_t en_seed = 0;
  auto* encode = app.add_subcommand("encode", "Encode a dataset with pq, lsh or onehot codes");
  encode->add_option("--manifest", en_manifest, "Dataset manifest")->required();
  encode->add_option("--codec", en_codec, "pq, lsh or onehot")
      ->check(CLI::IsMember({"pq", "lsh", "onehot"}));
  encode->add_option("--m", en_spec.m, "PQ subquantizers")->check(CLI::PositiveNumber);
  encode->add_option("--ks", en_spec.ks, "PQ centroids per subquantizer")->check(CLI::Range(1, 65536));
  encode->add_option("--bits", en_spec.bits, "LSH code length")->check(CLI::PositiveNumber);
  encode->add_option("--model", en_model, "Classifier model (onehot codec)");
  encode->add_option("--out", en_out, "Output code file")->required();
  encode->add_option("--seed", en_seed, "Random seed")->required();

  // eval-ssh
  hb::SshConfig ssh;
  std::string ssh_manifest;
  std::vector<std::string> ssh_strategies = {"all"};
  bool ssh_no_center = false, ssh_truncated = false;
  Output ssh_out;
  auto* essh = app.add_subcommand("eval-ssh", "Legacy SH/SSH evaluation of classifier-based codes");
  essh->add_option("--manifest", ssh_manifest, "Dataset manifest")->required();
  essh->add_option("--strategy", ssh_strategies, "onehot, lsh, topline or all")->delimiter(',');
  essh->add_option("--n-label", ssh.n_label, "Labeled database items (0 = all, the SH setting)");
  essh->add_option("--anchors", ssh.h, "Number of anchors")->check(CLI::PositiveNumber);
  essh->add_option("--queries-per-class", ssh.queries_per_class, "Held-out queries per class");
  essh->add_option("--runs", ssh.runs, "Repetitions")->check(CLI::PositiveNumber);
  essh->add_option("--bits", ssh.lsh_bits, "LSH code length")->check(CLI::PositiveNumber);
  essh->add_flag("--no-center", ssh_no_center, "Hash raw posteriors without subtracting 1/C");
  essh->add_option("--lambda-grid", ssh.lambda_grid, "Regularization grid")->delimiter(',');
  essh->add_option("--max-iter", ssh.max_iter, "Optimizer iteration cap");
  essh->add_option("--map-k", ssh.map_k, "mAP cutoff (0 = whole database)");
  essh->add_flag("--truncated-ap", ssh_truncated, "Normalize AP@k by min(cl, k)");
  essh->add_option("--seed", ssh.seed, "Random seed")->required();
  add_output_flags(essh, ssh_out);

  // eval-unseen
  hb::UnseenConfig un;
  std::string un_manifest, un_codec = "none", un_sim = "l2";
  Output un_out;
  auto* eunseen = app.add_subcommand("eval-unseen", "Protocol 1: retrieval of unseen classes");
  eunseen->add_option("--manifest", un_manifest, "Dataset manifest")->required();
  eunseen->add_option("--codec", un_codec, "none, pq or lsh");
  eunseen->add_option("--m", un.codec.m, "PQ subquantizers")->check(CLI::PositiveNumber);
  eunseen->add_option("--ks", un.codec.ks, "PQ centroids")->check(CLI::Range(1, 65536));
  eunseen->add_option("--bits", un.codec.bits, "LSH code length")->check(CLI::PositiveNumber);
  eunseen->add_option("--similarity", un_sim, "l2 or ip")->check(CLI::IsMember({"l2", "ip"}));
  eunseen->add_option("--test-fraction", un.test_fraction, "Per-class test share");
  eunseen->add_option("--map-k", un.map_k, "mAP cutoff (0 = whole database)");
  eunseen->add_option("--pq-max-train", un.pq_max_train, "PQ training rows (0 = all of train75)");
  eunseen->add_option("--seed", un.seed, "Random seed")->required();
  add_output_flags(eunseen, un_out);

  // eval-transfer
  hb::TransferConfig tr;
  std::string tr_manifest, tr_codec = "pq", tr_head = "softmax", tr_curve;
  std::vector<std::size_t> tr_sweep;
  Output tr_out;
  auto* etransfer = app.add_subcommand("eval-transfer", "Protocol 2: transfer learning on decoded codes");
  etransfer->add_option("--manifest", tr_manifest, "Dataset manifest")->required();
  etransfer->add_option("--codec", tr_codec, "none or pq");
  etransfer->add_option("--m", tr.codec.m, "PQ subquantizers")->check(CLI::PositiveNumber);
  etransfer->add_option("--ks", tr.codec.ks, "PQ centroids")->check(CLI::Range(1, 65536));
  etransfer->add_option("--m-sweep", tr_sweep, "Comma-separated M values; adds the codec-free run")
      ->delimiter(',');
  etransfer->add_option("--head", tr_head, "softmax or mlp")->check(CLI::IsMember({"softmax", "mlp"}));
  etransfer->add_option("--hidden", tr.head.hidden, "MLP hidden units")->check(CLI::PositiveNumber);
  etransfer->add_option("--lambda-grid", tr.head.lambda_grid, "Regularization grid")->delimiter(',');
  etransfer->add_option("--max-iter", tr.head.max_iter, "Optimizer iteration cap");
  etransfer->add_option("--test-fraction", tr.test_fraction, "Per-class test share");
  etransfer->add_option("--pq-max-train", tr.pq_max_train, "PQ training rows (0 = all of train75)");
  etransfer->add_option("--curve", tr_curve, "bytes_per_image,accuracy CSV path");
  etransfer->add_option("--seed", tr.seed, "Random seed")->required();
  add_output_flags(etransfer, tr_out);

  // report
  std::vector<std::string> rp_inputs;
  std::string rp_out;
  auto* report = app.add_subcommand("report", "Merge report CSVs into a Markdown table");
  report->add_option("inputs", rp_inputs, "Report CSV files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", rp_out, "Markdown path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    hb::set_num_threads(threads);

    if (*gen) {
      syn.seed = syn_seed;
      auto ds = hb::generate_synthetic(syn);
      ds.name = syn_name;
      std::filesystem::create_directories(syn_dir);
      std::cout << hb::write_dataset(ds, syn_dir) << '\n';
    } else if (*train) {
      const auto data = open_dataset(tc_manifest);
      hb::Rng rng = hb::make_rng(tc_seed, 0);
      std::vector<hb::Index> order(data.labels.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<hb::Index>(i);
      std::vector<hb::Index> labeled = order;
      if (tc_nlabel != 0 && tc_nlabel < order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        labeled.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(tc_nlabel));
        std::sort(labeled.begin(), labeled.end());
      }
      const auto lab_x = data.features.select_rows(labeled);
      hb::LabelVector lab_y;
      for (auto i : labeled) lab_y.push_back(data.labels[i]);
      const auto anchors = hb::fit_anchor_map(lab_x, data.features, tc_h, hb::derive_seed(tc_seed, 1));
      const auto g = anchors.apply_rows(lab_x);
      hb::SoftmaxTrainParams p;
      p.seed = tc_seed;
      const auto cv = hb::cross_validate_lambda(g, lab_y, data.num_classes, tc_grid,
                                                hb::derive_seed(tc_seed, 2), p);
      p.lambda = cv.chosen_lambda;
      const auto model = hb::train_softmax(g, lab_y, data.num_classes, p);
      hb::save_containers(tc_model, {anchors.to_container(), model.to_container()});
      std::string text = "lambda,holdout_accuracy,chosen\n";
      for (std::size_t i = 0; i < cv.grid.size(); ++i) {
        text += fmt::format("{:g},{:.8f},{}\n", cv.grid[i], cv.accuracy[i], i == cv.chosen_index ? 1 : 0);
      }
      if (!cv.stratified) std::cerr << "note: unstratified CV split (a class had < 2 items)\n";
      write_to(tc_cv, text);
    } else if (*encode) {
      const auto data = open_dataset(en_manifest);
      std::vector<hb::Container> records;
      if (en_codec == "pq") {
        hb::PqTrainParams p;
        p.m = en_spec.m;
        p.ks = en_spec.ks;
        p.seed = en_seed;
        const auto codebook = hb::pq_train(data.features, p);
        records = {codebook.to_container(), hb::pq_codes_container(codebook.encode_rows(data.features))};
      } else if (en_codec == "lsh") {
        auto frame = hb::TightFrame::create(data.features.cols(), en_spec.bits, en_seed);
        records = {frame.to_container(), hb::binary_codes_container(hb::lsh_encode_rows(frame, data.features))};
      } else {
        if (en_model.empty()) throw hb::ConfigError("--codec onehot needs --model from train-classifier");
        const auto parts = hb::load_containers(en_model);
        if (parts.size() != 2) throw hb::FormatError(en_model + ": expected anchor map and softmax model");
        const auto anchors = hb::GaussianAnchorMap::from_container(parts[0]);
        const auto model = hb::SoftmaxModel::from_container(parts[1]);
        const auto predicted = model.predict(anchors.apply_rows(data.features));
        records = {hb::onehot_codes_container(predicted, model.num_classes())};
      }
      hb::save_containers(en_out, records);
    } else if (*essh) {
      ssh.lsh_center = !ssh_no_center;
      if (ssh_truncated) ssh.normalizer = hb::ApNormalizer::kTruncated;
      const auto data = open_dataset(ssh_manifest);
      const auto strategies = parse_strategies(ssh_strategies);
      emit(ssh_out, hb::run_ssh(data, ssh, strategies));
    } else if (*eunseen) {
      un.codec.kind = parse_codec(un_codec);
      un.similarity = un_sim == "ip" ? hb::Similarity::kInnerProduct : hb::Similarity::kL2;
      const auto data = open_dataset(un_manifest);
      const auto splits = hb::make_class_splits(data.num_classes, un.seed);
      emit(un_out, {hb::run_protocol1(data, splits, un)});
    } else if (*etransfer) {
      tr.codec.kind = parse_codec(tr_codec);
      tr.head.kind = tr_head == "mlp" ? hb::HeadKind::kMlp : hb::HeadKind::kSoftmax;
      const auto data = open_dataset(tr_manifest);
      const auto splits = hb::make_class_splits(data.num_classes, tr.seed);
      if (tr_sweep.empty()) {
        const auto r = hb::run_protocol2(data, splits, tr);
        emit(tr_out, {r});
        if (!tr_curve.empty()) {
          const auto bits = tr.codec.code_size_bits();
          const hb::CurvePoint pt{bits ? *bits / 8.0 : 4.0 * data.features.cols(), r.mean};
          std::ostringstream c;
          hb::write_curve_csv(c, std::span(&pt, 1));
          write_to(tr_curve, c.str());
        }
      } else {
        if (tr.codec.kind == hb::CodecKind::kLsh) {
          throw hb::UnsupportedCodecError("--m-sweep applies to pq only");
        }
        const auto sweep = hb::run_transfer_sweep(data, splits, tr, tr_sweep);
        emit(tr_out, sweep.reports);
        if (!tr_curve.empty()) {
          std::ostringstream c;
          hb::write_curve_csv(c, sweep.curve);
          write_to(tr_curve, c.str());
        }
      }
    } else if (*report) {
      std::vector<hb::ProtocolReport> all;
      for (const auto& path : rp_inputs) {
        std::ifstream f(path, std::ios::binary);
        auto part = hb::read_report_csv(f);
        all.insert(all.end(), part.begin(), part.end());
      }
      std::ostringstream md;
      hb::write_markdown_table(md, all);
      write_to(rp_out, md.str());
    }
  } catch (const hb::InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.invariant() << "\n  " << e.what() << '\n';
    return 3;
  } catch (const hb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
