#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hashbench/types.hpp"

namespace hashbench {

/// fvecs: each record is a little-endian int32 d followed by d float32
/// values; every record shares d. An empty file is a 0 x 0 matrix.
FeatureMatrix load_fvecs(const std::string& path);
void save_fvecs(const std::string& path, const FeatureMatrix& x);

/// ivecs with one value per record (d = 1), as used for label files.
std::vector<std::int32_t> load_ivecs_column(const std::string& path);
void save_ivecs_column(const std::string& path, std::span<const std::int32_t> values);

/// Labels remapped onto the dense alphabet [0, C): the distinct raw values
/// sorted ascending, so alphabet[c] is the raw value of class c.
struct LabelSet {
  LabelVector labels;
  std::vector<std::int32_t> alphabet;
  std::size_t num_classes() const noexcept { return alphabet.size(); }
};

/// Negative labels are a FormatError.
LabelSet densify_labels(std::span<const std::int32_t> raw);
LabelSet load_labels_ivecs(const std::string& path);
/// One integer per line; blank lines are ignored.
LabelSet load_labels_text(const std::string& path);
/// Dispatches on the extension: ".ivecs" is binary, anything else text.
LabelSet load_labels(const std::string& path);

/// Flat "key = value" text manifest. Paths are relative to the manifest's
/// directory. Keys: name, features, features_format (fvecs), labels,
/// labels_format (ivecs|text), n, d, c, split (optional ivecs column,
/// 1 = query/test item), checksum (sha256 over the referenced files).
struct DatasetManifest {
  std::string name;
  std::string features;
  std::string features_format = "fvecs";
  std::string labels;
  std::string labels_format = "ivecs";
  std::size_t n = 0, d = 0, c = 0;
  std::string split;
  std::string checksum;
  /// Directory the relative paths resolve against (not serialized).
  std::string base_dir;

  std::string resolve(const std::string& relative) const;
};

DatasetManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const DatasetManifest& m);
/// Hex SHA-256 over the features, labels and (if any) split files in order.
std::string compute_checksum(const DatasetManifest& m);

struct Dataset {
  std::string name;
  FeatureMatrix features;
  LabelVector labels;
  std::size_t num_classes = 0;
  /// Optional predefined query/test flags (1 = test); empty when absent.
  std::vector<std::uint8_t> is_test;
};

/// Verifies the checksum (CorruptionError on mismatch, before any parsing)
/// and the declared shapes (FormatError).
Dataset load_dataset(const DatasetManifest& m);

struct SyntheticSpec {
  std::size_t num_classes = 10;
  std::size_t per_class = 100;
  std::size_t dim = 32;
  /// Class-center separation in units of sigma_w.
  double separation = 4.0;
  double sigma_w = 1.0;
  std::uint64_t seed = 0;
};

/// Gaussian mixture: class centers on a sphere of radius s sigma_w / sqrt(2)
/// (so two random centers lie about s sigma_w apart), isotropic noise
/// sigma_w around each center. Item i belongs to class i mod C.
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Writes <dir>/<name>.fvecs, <name>.labels.ivecs and <name>.manifest
/// (with checksum); returns the manifest path.
std::string write_dataset(const Dataset& ds, const std::string& dir);

}  // namespace hashbench
