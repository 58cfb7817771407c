// Serial reference kernels against their OpenMP counterparts.
// Run with HASHBENCH_THREADS / OMP_NUM_THREADS to vary the thread count.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hashbench/kernels.hpp"

namespace ks = hashbench::kernels;
using hashbench::FeatureMatrix;
using hashbench::Label;
using hashbench::Matrix;

namespace {

FeatureMatrix random_features(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0.0f, 1.0f);
  FeatureMatrix m(rows, cols);
  for (auto& v : m.values()) v = n(rng);
  return m;
}

struct Fixture {
  FeatureMatrix db = random_features(50000, 128, 1);
  FeatureMatrix query = random_features(1, 128, 2);
  FeatureMatrix centroids = random_features(256, 16, 3);
  FeatureMatrix points = random_features(20000, 16, 4);
  FeatureMatrix anchors = random_features(300, 128, 5);
  std::vector<std::uint8_t> codes = std::vector<std::uint8_t>(1000000 * 8);
  std::vector<std::uint8_t> code_q = std::vector<std::uint8_t>(8, 0x5a);
  std::vector<std::uint16_t> pq_codes = std::vector<std::uint16_t>(1000000 * 8);
  std::vector<double> table = std::vector<double>(8 * 256, 0.5);
  Matrix<double> features;
  std::vector<Label> labels;

  Fixture() {
    std::mt19937_64 rng(6);
    for (auto& c : codes) c = static_cast<std::uint8_t>(rng());
    for (auto& c : pq_codes) c = static_cast<std::uint16_t>(rng() % 256);
    ks::serial::gaussian_features(random_features(20000, 128, 7), anchors, 10.0, features);
    labels.resize(features.rows());
    for (auto& y : labels) y = static_cast<Label>(rng() % 10);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

template <bool Parallel>
void BM_SquaredL2Scan(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<double> out(f.db.rows());
  for (auto _ : state) {
    if constexpr (Parallel) ks::omp::squared_l2_scan(f.db, f.query.row(0), out);
    else ks::serial::squared_l2_scan(f.db, f.query.row(0), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.db.rows()));
}

template <bool Parallel>
void BM_HammingScan(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<std::uint32_t> out(f.codes.size() / 8);
  for (auto _ : state) {
    if constexpr (Parallel) ks::omp::hamming_scan(f.codes, 8, f.code_q, out);
    else ks::serial::hamming_scan(f.codes, 8, f.code_q, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Parallel>
void BM_AdcScan(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<double> out(f.pq_codes.size() / 8);
  for (auto _ : state) {
    if constexpr (Parallel) ks::omp::adc_scan(f.table, 8, 256, f.pq_codes, out);
    else ks::serial::adc_scan(f.table, 8, 256, f.pq_codes, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Parallel>
void BM_AssignNearest(benchmark::State& state) {
  const auto& f = fixture();
  const std::size_t n = f.points.rows();
  std::vector<std::uint32_t> assign(n);
  std::vector<double> dist(n);
  for (auto _ : state) {
    if constexpr (Parallel) ks::omp::assign_nearest(f.points.data(), n, 16, f.centroids.data(), 256, assign, dist);
    else ks::serial::assign_nearest(f.points.data(), n, 16, f.centroids.data(), 256, assign, dist);
    benchmark::DoNotOptimize(assign.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_GaussianFeatures(benchmark::State& state) {
  const auto& f = fixture();
  const auto x = random_features(5000, 128, 8);
  Matrix<double> out;
  for (auto _ : state) {
    if constexpr (Parallel) ks::omp::gaussian_features(x, f.anchors, 10.0, out);
    else ks::serial::gaussian_features(x, f.anchors, 10.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 5000);
}

template <bool Parallel>
void BM_SoftmaxLossGrad(benchmark::State& state) {
  const auto& f = fixture();
  const std::size_t c = 10, d = f.features.cols();
  const ks::SoftmaxBatch batch{&f.features, f.labels, c};
  std::vector<double> w(c * d, 0.01), b(c, 0.0), gw(c * d), gb(c);
  for (auto _ : state) {
    double loss;
    if constexpr (Parallel) loss = ks::omp::softmax_loss_grad(batch, w, b, gw, gb);
    else loss = ks::serial::softmax_loss_grad(batch, w, b, gw, gb);
    benchmark::DoNotOptimize(loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.features.rows()));
}

}  // namespace

BENCHMARK(BM_SquaredL2Scan<false>)->Name("squared_l2_scan/serial");
BENCHMARK(BM_SquaredL2Scan<true>)->Name("squared_l2_scan/omp");
BENCHMARK(BM_HammingScan<false>)->Name("hamming_scan/serial");
BENCHMARK(BM_HammingScan<true>)->Name("hamming_scan/omp");
BENCHMARK(BM_AdcScan<false>)->Name("adc_scan/serial");
BENCHMARK(BM_AdcScan<true>)->Name("adc_scan/omp");
BENCHMARK(BM_AssignNearest<false>)->Name("assign_nearest/serial");
BENCHMARK(BM_AssignNearest<true>)->Name("assign_nearest/omp");
BENCHMARK(BM_GaussianFeatures<false>)->Name("gaussian_features/serial");
BENCHMARK(BM_GaussianFeatures<true>)->Name("gaussian_features/omp");
BENCHMARK(BM_SoftmaxLossGrad<false>)->Name("softmax_loss_grad/serial");
BENCHMARK(BM_SoftmaxLossGrad<true>)->Name("softmax_loss_grad/omp");

BENCHMARK_MAIN();
