#include <cmath>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "hashbench/dataio.hpp"
#include "hashbench/error.hpp"
#include "oracles.hpp"

using namespace hashbench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("hashbench_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("fvecs round trip and malformed files") {
  TempDir dir("fvecs");
  const auto x = oracle::gaussian_matrix(17, 5, 1);
  save_fvecs(dir.file("a.fvecs"), x);
  CHECK(fs::file_size(dir.file("a.fvecs")) == 17 * (4 + 5 * 4));
  CHECK(load_fvecs(dir.file("a.fvecs")) == x);

  write_bytes(dir.file("empty.fvecs"), {});
  CHECK(load_fvecs(dir.file("empty.fvecs")).rows() == 0);

  // d = 2 followed by a single float: truncated.
  write_bytes(dir.file("trunc.fvecs"), {2, 0, 0, 0, 0, 0, 128, 63});
  CHECK_THROWS_AS(load_fvecs(dir.file("trunc.fvecs")), FormatError);

  // Two records with different d.
  write_bytes(dir.file("mixed.fvecs"),
              {1, 0, 0, 0, 0, 0, 128, 63, 2, 0, 0, 0, 0, 0, 128, 63, 0, 0, 128, 63});
  try {
    load_fvecs(dir.file("mixed.fvecs"));
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("offset 8") != std::string::npos);
  }
}

TEST_CASE("labels: ivecs, text, densification") {
  TempDir dir("labels");
  const std::vector<std::int32_t> raw = {7, 3, 7, 11, 3};
  save_ivecs_column(dir.file("l.ivecs"), raw);
  CHECK(load_ivecs_column(dir.file("l.ivecs")) == raw);
  const auto set = load_labels(dir.file("l.ivecs"));
  CHECK(set.labels == LabelVector{1, 0, 1, 2, 0});
  CHECK(set.alphabet == std::vector<std::int32_t>{3, 7, 11});

  std::ofstream(dir.file("l.txt")) << "4\n\n2\n4\n";
  const auto text = load_labels(dir.file("l.txt"));
  CHECK(text.labels == LabelVector{1, 0, 1});
  CHECK(text.num_classes() == 2);

  const std::vector<std::int32_t> negative = {1, -1};
  CHECK_THROWS_AS(densify_labels(negative), FormatError);
}

TEST_CASE("manifest round trip, checksum and shape verification") {
  TempDir dir("manifest");
  SyntheticSpec s;
  s.num_classes = 3;
  s.per_class = 4;
  s.dim = 2;
  s.seed = 5;
  auto ds = generate_synthetic(s);
  ds.name = "tiny";
  ds.is_test = {0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0};
  const auto path = write_dataset(ds, dir.path.string());
  const auto m = read_manifest(path);
  CHECK(m.n == 12);
  CHECK(m.d == 2);
  CHECK(m.c == 3);
  CHECK(m.checksum == compute_checksum(m));
  const auto back = load_dataset(m);
  CHECK(back.features == ds.features);
  CHECK(back.labels == ds.labels);
  CHECK(back.is_test == ds.is_test);

  // Flip one byte of the features: the checksum must catch it.
  {
    std::fstream f(m.resolve(m.features), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(6);
    f.put('\x42');
  }
  CHECK_THROWS_AS(load_dataset(m), CorruptionError);

  auto wrong = read_manifest(path);
  wrong.n = 13;
  wrong.checksum.clear();
  save_fvecs(wrong.resolve(wrong.features), ds.features);
  CHECK_THROWS_AS(load_dataset(wrong), FormatError);
}

TEST_CASE("synthetic generator: seeded, class i mod C, centers at the stated radius") {
  SyntheticSpec s;
  s.num_classes = 5;
  s.per_class = 400;
  s.dim = 16;
  s.separation = 6.0;
  s.sigma_w = 0.5;
  s.seed = 9;
  const auto a = generate_synthetic(s);
  CHECK(a.features == generate_synthetic(s).features);
  CHECK(a.num_classes == 5);
  for (std::size_t i = 0; i < a.labels.size(); ++i) CHECK(a.labels[i] == static_cast<Label>(i % 5));

  // Class means estimate the centers; their norm should be s * sigma / sqrt(2).
  for (Label c = 0; c < 5; ++c) {
    std::vector<double> mean(16, 0.0);
    for (std::size_t i = static_cast<std::size_t>(c); i < a.labels.size(); i += 5) {
      for (std::size_t j = 0; j < 16; ++j) mean[j] += a.features(i, j) / 400.0;
    }
    double norm = 0.0;
    for (double v : mean) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(6.0 * 0.5 / std::sqrt(2.0)).epsilon(0.1));
  }
  s.seed = 10;
  CHECK_FALSE(generate_synthetic(s).features == a.features);
}
