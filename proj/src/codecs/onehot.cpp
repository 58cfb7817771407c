#include <bit>
#include <string>

#include "hashbench/codecs.hpp"

namespace hashbench {

std::size_t onehot_code_bits(std::size_t num_classes) {
  if (num_classes < 2) return 0;
  return static_cast<std::size_t>(std::bit_width(num_classes - 1));
}

OneHotCode onehot_encode(std::span<const double> probs) {
  if (probs.empty()) throw ShapeError("one-hot encode of an empty posterior");
  std::size_t best = 0;
  for (std::size_t c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return {static_cast<Label>(best), probs.size()};
}

}  // namespace hashbench
