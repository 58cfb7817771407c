#include "hashbench/dataio.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "hashbench/detail/le.hpp"
#include "hashbench/random.hpp"

namespace hashbench {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  return out;
}

std::string at(const std::string& path, std::uint64_t offset) {
  return path + " at offset " + std::to_string(offset);
}

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw FormatError("manifest key '" + key + "' is not a non-negative integer: " + v);
  }
  return out;
}

}  // namespace

FeatureMatrix load_fvecs(const std::string& path) {
  auto in = open_in(path);
  std::vector<float> values;
  std::size_t rows = 0;
  std::int32_t dim = -1;
  std::uint64_t offset = 0;
  while (in.peek() != std::char_traits<char>::eof()) {
    std::int32_t d = 0;
    if (!detail::read_le(in, d)) throw FormatError("truncated record header in " + at(path, offset));
    if (d <= 0) throw FormatError("non-positive dimension " + std::to_string(d) + " in " + at(path, offset));
    if (dim >= 0 && d != dim) {
      throw FormatError("dimension " + std::to_string(d) + " differs from " + std::to_string(dim) +
                        " in " + at(path, offset));
    }
    dim = d;
    for (std::int32_t j = 0; j < d; ++j) {
      float v;
      if (!detail::read_le(in, v)) throw FormatError("truncated record in " + at(path, offset));
      values.push_back(v);
    }
    offset += 4 + 4 * static_cast<std::uint64_t>(d);
    ++rows;
  }
  if (rows == 0) return {};
  return FeatureMatrix(rows, static_cast<std::size_t>(dim), std::move(values));
}

void save_fvecs(const std::string& path, const FeatureMatrix& x) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    detail::write_le(out, static_cast<std::int32_t>(x.cols()));
    for (float v : x.row(i)) detail::write_le(out, v);
  }
  if (!out) throw Error("write failed: " + path);
}

std::vector<std::int32_t> load_ivecs_column(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::int32_t> out;
  std::uint64_t offset = 0;
  while (in.peek() != std::char_traits<char>::eof()) {
    std::int32_t d = 0, v = 0;
    if (!detail::read_le(in, d)) throw FormatError("truncated record header in " + at(path, offset));
    if (d != 1) {
      throw FormatError("expected single-value ivecs records, got d=" + std::to_string(d) + " in " +
                        at(path, offset));
    }
    if (!detail::read_le(in, v)) throw FormatError("truncated record in " + at(path, offset));
    out.push_back(v);
    offset += 8;
  }
  return out;
}

void save_ivecs_column(const std::string& path, std::span<const std::int32_t> values) {
  auto out = open_out(path);
  for (auto v : values) {
    detail::write_le(out, std::int32_t{1});
    detail::write_le(out, v);
  }
  if (!out) throw Error("write failed: " + path);
}

LabelSet densify_labels(std::span<const std::int32_t> raw) {
  std::set<std::int32_t> distinct;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < 0) {
      throw FormatError("negative label " + std::to_string(raw[i]) + " at item " + std::to_string(i));
    }
    distinct.insert(raw[i]);
  }
  LabelSet out;
  out.alphabet.assign(distinct.begin(), distinct.end());
  std::map<std::int32_t, Label> dense;
  for (std::size_t c = 0; c < out.alphabet.size(); ++c) dense[out.alphabet[c]] = static_cast<Label>(c);
  out.labels.reserve(raw.size());
  for (auto v : raw) out.labels.push_back(dense[v]);
  return out;
}

LabelSet load_labels_ivecs(const std::string& path) { return densify_labels(load_ivecs_column(path)); }

LabelSet load_labels_text(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::int32_t> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::int32_t v = 0;
    const auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || p != line.data() + line.size()) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": not an integer label: " + line);
    }
    raw.push_back(v);
  }
  return densify_labels(raw);
}

LabelSet load_labels(const std::string& path) {
  return fs::path(path).extension() == ".ivecs" ? load_labels_ivecs(path) : load_labels_text(path);
}

std::string DatasetManifest::resolve(const std::string& relative) const {
  if (relative.empty()) return relative;
  const fs::path p(relative);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).string();
}

DatasetManifest read_manifest(const std::string& path) {
  auto in = open_in(path);
  DatasetManifest m;
  m.base_dir = fs::path(path).parent_path().string();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "name") m.name = value;
    else if (key == "features") m.features = value;
    else if (key == "features_format") m.features_format = value;
    else if (key == "labels") m.labels = value;
    else if (key == "labels_format") m.labels_format = value;
    else if (key == "n") m.n = parse_size(key, value);
    else if (key == "d") m.d = parse_size(key, value);
    else if (key == "c") m.c = parse_size(key, value);
    else if (key == "split") m.split = value;
    else if (key == "checksum") m.checksum = value;
    else throw FormatError(path + ":" + std::to_string(lineno) + ": unknown manifest key '" + key + "'");
  }
  if (m.features.empty() || m.labels.empty()) {
    throw FormatError(path + ": manifest needs 'features' and 'labels'");
  }
  if (m.features_format != "fvecs") throw FormatError("unsupported features_format " + m.features_format);
  if (m.labels_format != "ivecs" && m.labels_format != "text") {
    throw FormatError("unsupported labels_format " + m.labels_format);
  }
  return m;
}

void write_manifest(const std::string& path, const DatasetManifest& m) {
  auto out = open_out(path);
  out << "name = " << m.name << "\n"
      << "features = " << m.features << "\n"
      << "features_format = " << m.features_format << "\n"
      << "labels = " << m.labels << "\n"
      << "labels_format = " << m.labels_format << "\n"
      << "n = " << m.n << "\n"
      << "d = " << m.d << "\n"
      << "c = " << m.c << "\n";
  if (!m.split.empty()) out << "split = " << m.split << "\n";
  if (!m.checksum.empty()) out << "checksum = " << m.checksum << "\n";
}

std::string compute_checksum(const DatasetManifest& m) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 unavailable");
  }
  std::vector<char> buf(1 << 16);
  for (const auto* rel : {&m.features, &m.labels, &m.split}) {
    if (rel->empty()) continue;
    auto in = open_in(m.resolve(*rel));
    while (in) {
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

Dataset load_dataset(const DatasetManifest& m) {
  if (!m.checksum.empty()) {
    const auto actual = compute_checksum(m);
    if (actual != m.checksum) {
      throw CorruptionError("dataset '" + m.name + "' checksum mismatch: manifest " + m.checksum +
                            ", files " + actual);
    }
  }
  Dataset ds;
  ds.name = m.name;
  ds.features = load_fvecs(m.resolve(m.features));
  const auto labels = m.labels_format == "text" ? load_labels_text(m.resolve(m.labels))
                                                : load_labels_ivecs(m.resolve(m.labels));
  ds.labels = labels.labels;
  ds.num_classes = labels.num_classes();
  if (ds.labels.size() != ds.features.rows()) {
    throw FormatError("dataset '" + m.name + "': " + std::to_string(ds.features.rows()) +
                      " feature rows vs " + std::to_string(ds.labels.size()) + " labels");
  }
  auto mismatch = [&](const char* what, std::size_t declared, std::size_t actual) {
    if (declared != 0 && declared != actual) {
      throw FormatError("dataset '" + m.name + "': declared " + what + "=" + std::to_string(declared) +
                        " but files hold " + std::to_string(actual));
    }
  };
  mismatch("n", m.n, ds.features.rows());
  mismatch("d", m.d, ds.features.cols());
  mismatch("c", m.c, ds.num_classes);
  if (!m.split.empty()) {
    const auto flags = load_ivecs_column(m.resolve(m.split));
    if (flags.size() != ds.labels.size()) throw FormatError("split file length mismatch");
    ds.is_test.reserve(flags.size());
    for (auto f : flags) {
      if (f != 0 && f != 1) throw FormatError("split flags must be 0 or 1");
      ds.is_test.push_back(static_cast<std::uint8_t>(f));
    }
  }
  return ds;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_classes < 1 || spec.per_class < 1 || spec.dim < 1 || !(spec.sigma_w > 0.0) ||
      !(spec.separation >= 0.0)) {
    throw ConfigError("synthetic spec needs positive C, per-class count, d, sigma_w and s >= 0");
  }
  Rng rng = make_rng(spec.seed, 0x5e7);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double radius = spec.separation * spec.sigma_w / std::sqrt(2.0);
  std::vector<double> centers(spec.num_classes * spec.dim);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    double norm = 0.0;
    double* ctr = centers.data() + c * spec.dim;
    for (std::size_t t = 0; t < spec.dim; ++t) {
      ctr[t] = normal(rng);
      norm += ctr[t] * ctr[t];
    }
    norm = std::sqrt(norm);
    for (std::size_t t = 0; t < spec.dim; ++t) ctr[t] = norm > 0 ? radius * ctr[t] / norm : 0.0;
  }
  Dataset ds;
  ds.name = "synthetic";
  ds.num_classes = spec.num_classes;
  const std::size_t n = spec.num_classes * spec.per_class;
  ds.features = FeatureMatrix(n, spec.dim);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % spec.num_classes;
    ds.labels[i] = static_cast<Label>(c);
    auto row = ds.features.row(i);
    for (std::size_t t = 0; t < spec.dim; ++t) {
      row[t] = static_cast<float>(centers[c * spec.dim + t] + spec.sigma_w * normal(rng));
    }
  }
  return ds;
}

std::string write_dataset(const Dataset& ds, const std::string& dir) {
  fs::create_directories(dir);
  DatasetManifest m;
  m.name = ds.name;
  m.base_dir = dir;
  m.features = ds.name + ".fvecs";
  m.labels = ds.name + ".labels.ivecs";
  m.labels_format = "ivecs";
  m.n = ds.features.rows();
  m.d = ds.features.cols();
  m.c = ds.num_classes;
  save_fvecs(m.resolve(m.features), ds.features);
  save_ivecs_column(m.resolve(m.labels), ds.labels);
  if (!ds.is_test.empty()) {
    m.split = ds.name + ".split.ivecs";
    std::vector<std::int32_t> flags(ds.is_test.begin(), ds.is_test.end());
    save_ivecs_column(m.resolve(m.split), flags);
  }
  m.checksum = compute_checksum(m);
  const auto path = (fs::path(dir) / (ds.name + ".manifest")).string();
  write_manifest(path, m);
  return path;
}

}  // namespace hashbench
