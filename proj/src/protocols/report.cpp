#include <cmath>
#include <string>

#include "hashbench/codecs.hpp"
#include "hashbench/protocols.hpp"

namespace hashbench {

void ProtocolReport::finalize() {
  if (runs.empty()) {
    mean = stddev = 0.0;
    return;
  }
  double sum = 0.0;
  for (const auto& r : runs) sum += r.value;
  mean = sum / static_cast<double>(runs.size());
  double sq = 0.0;
  for (const auto& r : runs) sq += (r.value - mean) * (r.value - mean);
  stddev = std::sqrt(sq / static_cast<double>(runs.size()));
}

void ProtocolReport::self_check() const {
  ProtocolReport copy = *this;
  copy.finalize();
  check_invariant(std::abs(copy.mean - mean) <= 1e-12 && std::abs(copy.stddev - stddev) <= 1e-12,
                  "report_mean_std_recomputable");
  for (const auto& r : runs) {
    check_invariant(r.value >= 0.0 && r.value <= 1.0, "metric_in_unit_interval",
                    method + " fold " + std::to_string(r.fold) + " run " + std::to_string(r.run));
  }
}

std::string CodecSpec::label() const {
  switch (kind) {
    case CodecKind::kNone: return "none";
    case CodecKind::kLsh: return "lsh(b=" + std::to_string(bits) + ")";
    case CodecKind::kPq:
      return ks == 256 ? "pq(M=" + std::to_string(m) + ")"
                       : "pq(M=" + std::to_string(m) + ",ks=" + std::to_string(ks) + ")";
  }
  return "unknown";
}

std::optional<std::size_t> CodecSpec::code_size_bits() const {
  switch (kind) {
    case CodecKind::kNone: return std::nullopt;
    case CodecKind::kLsh: return bits;
    case CodecKind::kPq: return m * onehot_code_bits(ks);
  }
  return std::nullopt;
}

}  // namespace hashbench
