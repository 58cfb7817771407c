#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hashbench/classifier.hpp"
#include "hashbench/dataio.hpp"
#include "hashbench/metrics.hpp"

namespace hashbench {

// ---- reports -------------------------------------------------------------------

struct RunRecord {
  int fold = 0;
  int run = 0;
  double value = 0.0;
  /// Query classification accuracy of the run's classifier (SSH only).
  std::optional<double> accuracy;
  std::size_t skipped_queries = 0;
};

struct ProtocolReport {
  std::string protocol;  // "ssh", "unseen", "transfer"
  std::string dataset;
  std::string method;
  std::string metric;  // "mAP" or "accuracy"
  std::size_t n_label = 0;
  std::size_t h = 0;
  /// Stored bits per database item; nullopt for uncompressed storage.
  std::optional<std::size_t> code_size_bits;
  /// mAP cutoff; 0 means the whole database.
  std::size_t k = 0;
  std::vector<RunRecord> runs;
  double mean = 0.0;
  /// Population standard deviation of the per-run values.
  double stddev = 0.0;
  std::vector<std::pair<std::string, std::string>> config;

  /// Recomputes mean and stddev from `runs` in stored order.
  void finalize();
  /// Throws InvariantViolation if mean/stddev disagree with `runs`.
  void self_check() const;
};

// ---- codec selection -------------------------------------------------------------

enum class CodecKind { kNone, kPq, kLsh };

struct CodecSpec {
  CodecKind kind = CodecKind::kNone;
  std::size_t m = 8;
  std::size_t ks = 256;
  std::size_t bits = 64;

  /// "none", "pq(M=4)", "pq(M=4,ks=16)", "lsh(b=64)".
  std::string label() const;
  /// nullopt for kNone.
  std::optional<std::size_t> code_size_bits() const;
};

// ---- legacy SH / SSH ---------------------------------------------------------------

enum class SshStrategy { kOneHot, kLsh, kTopline };
std::string to_string(SshStrategy s);

struct SshConfig {
  /// Labeled database items; 0 labels the whole database (the SH setting).
  std::size_t n_label = 0;
  std::size_t h = 1000;
  std::size_t queries_per_class = 100;
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  std::size_t lsh_bits = 64;
  /// Subtract the uniform vector 1/C before hashing posteriors.
  bool lsh_center = true;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::size_t max_iter = 500;
  std::size_t map_k = 0;
  ApNormalizer normalizer = ApNormalizer::kCorrectCount;
};

/// One report per strategy; all strategies share each run's query sample,
/// labeled subset and classifier, so their results pair up run by run.
std::vector<ProtocolReport> run_ssh(const Dataset& data, const SshConfig& config,
                                    std::span<const SshStrategy> strategies);
ProtocolReport run_ssh(const Dataset& data, const SshConfig& config, SshStrategy strategy);

// ---- class-split protocols ------------------------------------------------------------

inline constexpr int kFolds = 4;

struct ClassSplit {
  std::uint64_t seed = 0;
  int fold = 0;
  std::vector<Label> known_classes;     // ~75%
  std::vector<Label> held_out_classes;  // ~25%
};

/// One seeded shuffle of the classes; fold f holds out the f-th quarter.
/// Quarters have floor(C/4) classes plus one of the C mod 4 leftovers for
/// the first folds. Throws ConfigError when C < 8.
std::array<ClassSplit, kFolds> make_class_splits(std::size_t num_classes, std::uint64_t seed);

struct SplitItems {
  std::vector<Index> train75, test75, train25, test25;
};

/// Per-item test flags: the dataset's own split when present, otherwise a
/// seeded per-class split holding out round(test_fraction * n_c) items
/// (at least one, at most n_c - 1) of every class.
std::vector<std::uint8_t> item_test_flags(const Dataset& data, double test_fraction,
                                          std::uint64_t seed);
SplitItems split_items(const Dataset& data, const ClassSplit& split,
                       std::span<const std::uint8_t> is_test);

enum class Similarity { kL2, kInnerProduct };

struct UnseenConfig {
  std::uint64_t seed = 0;
  CodecSpec codec;
  Similarity similarity = Similarity::kL2;
  double test_fraction = 1.0 / 6.0;
  std::size_t map_k = 0;
  /// PQ training rows drawn from train75; 0 uses all of them.
  std::size_t pq_max_train = 0;
};

/// Retrieval of unseen classes: per fold, index train25 (encoded by a codec
/// learned on train75), query with test25, report mAP averaged over folds.
ProtocolReport run_protocol1(const Dataset& data, std::span<const ClassSplit> splits,
                             const UnseenConfig& config);

enum class HeadKind { kSoftmax, kMlp };

struct HeadConfig {
  HeadKind kind = HeadKind::kSoftmax;
  std::size_t hidden = 128;
  std::vector<double> lambda_grid = {1e-3, 1e-2, 1e-1};
  std::size_t max_iter = 500;
};

struct TransferConfig {
  std::uint64_t seed = 0;
  CodecSpec codec;
  HeadConfig head;
  double test_fraction = 1.0 / 6.0;
  std::size_t pq_max_train = 0;
};

/// Transfer learning: per fold, encode then decode train25, train a fresh
/// head on the reconstructions and report its accuracy on raw test25.
/// Throws UnsupportedCodecError for codecs without a decoder (LSH).
ProtocolReport run_protocol2(const Dataset& data, std::span<const ClassSplit> splits,
                             const TransferConfig& config);

struct CurvePoint {
  double bytes_per_image = 0.0;
  double accuracy = 0.0;
};

struct TransferSweep {
  std::vector<ProtocolReport> reports;  // one per M, then the codec-free topline
  std::vector<CurvePoint> curve;        // same order
};

/// Protocol 2 at every M in `m_values` (PQ, ks from config.codec) plus the
/// codec-free run.
TransferSweep run_transfer_sweep(const Dataset& data, std::span<const ClassSplit> splits,
                                 const TransferConfig& config,
                                 std::span<const std::size_t> m_values);

}  // namespace hashbench
