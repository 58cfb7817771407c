#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hashbench/protocols.hpp"
#include "hashbench/random.hpp"

namespace hashbench {

std::array<ClassSplit, kFolds> make_class_splits(std::size_t num_classes, std::uint64_t seed) {
  if (num_classes < 2 * kFolds) {
    throw ConfigError("class splits need at least 8 classes, got " + std::to_string(num_classes));
  }
  std::vector<Label> order(num_classes);
  std::iota(order.begin(), order.end(), Label{0});
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::array<ClassSplit, kFolds> out;
  const std::size_t base = num_classes / kFolds;
  const std::size_t extra = num_classes % kFolds;
  std::size_t begin = 0;
  for (int f = 0; f < kFolds; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    auto& s = out[f];
    s.seed = seed;
    s.fold = f;
    for (std::size_t i = 0; i < num_classes; ++i) {
      (i >= begin && i < begin + size ? s.held_out_classes : s.known_classes).push_back(order[i]);
    }
    std::sort(s.known_classes.begin(), s.known_classes.end());
    std::sort(s.held_out_classes.begin(), s.held_out_classes.end());
    begin += size;
  }
  return out;
}

std::vector<std::uint8_t> item_test_flags(const Dataset& data, double test_fraction,
                                          std::uint64_t seed) {
  if (!data.is_test.empty()) {
    if (data.is_test.size() != data.labels.size()) throw ShapeError("split flags vs labels");
    return data.is_test;
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  std::vector<std::vector<Index>> by_class(data.num_classes);
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    by_class[data.labels[i]].push_back(static_cast<Index>(i));
  }
  std::vector<std::uint8_t> flags(data.labels.size(), 0);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& items = by_class[c];
    if (items.size() < 2) {
      throw InsufficientDataError("class " + std::to_string(c) +
                                  " needs at least two items for a train/test split");
    }
    Rng rng = make_rng(seed, c);
    std::shuffle(items.begin(), items.end(), rng);
    const auto want = static_cast<std::size_t>(std::llround(test_fraction * items.size()));
    const std::size_t n_test = std::clamp<std::size_t>(want, 1, items.size() - 1);
    for (std::size_t i = 0; i < n_test; ++i) flags[items[i]] = 1;
  }
  return flags;
}

SplitItems split_items(const Dataset& data, const ClassSplit& split,
                       std::span<const std::uint8_t> is_test) {
  if (is_test.size() != data.labels.size()) throw ShapeError("split flags vs labels");
  std::vector<std::uint8_t> held(data.num_classes, 0);
  for (Label c : split.held_out_classes) held.at(c) = 1;
  SplitItems s;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    const auto idx = static_cast<Index>(i);
    if (held[data.labels[i]]) {
      (is_test[i] ? s.test25 : s.train25).push_back(idx);
    } else {
      (is_test[i] ? s.test75 : s.train75).push_back(idx);
    }
  }
  return s;
}

}  // namespace hashbench
