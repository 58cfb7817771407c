#include <string>

#include "hashbench/codecs.hpp"
#include "hashbench/error.hpp"
#include "hashbench/pq.hpp"

namespace hashbench {

namespace {

void expect(const Container& c, ContainerKind kind, std::size_t ndims) {
  if (c.kind != kind) {
    throw FormatError("expected a " + std::string(kind_name(kind)) + " record, got " +
                      std::string(kind_name(c.kind)));
  }
  if (c.dims.size() != ndims) throw FormatError(std::string(kind_name(kind)) + ": bad dims");
}

}  // namespace

Container onehot_codes_container(std::span<const Label> classes, std::size_t num_classes) {
  const std::size_t width = onehot_code_bits(num_classes);
  Container c;
  c.kind = ContainerKind::kOneHotCodes;
  c.dims = {static_cast<std::uint32_t>(classes.size()), static_cast<std::uint32_t>(num_classes)};
  c.bytes.assign((classes.size() * width + 7) / 8, 0);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const Label v = classes[i];
    if (v < 0 || static_cast<std::size_t>(v) >= num_classes) {
      throw RangeError("class " + std::to_string(v) + " outside [0, " +
                       std::to_string(num_classes) + ")");
    }
    for (std::size_t b = 0; b < width; ++b) {
      if ((static_cast<std::uint32_t>(v) >> b) & 1u) {
        const std::size_t bit = i * width + b;
        c.bytes[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
      }
    }
  }
  return c;
}

LabelVector onehot_codes_from_container(const Container& c) {
  expect(c, ContainerKind::kOneHotCodes, 2);
  const std::size_t n = c.dims[0], num_classes = c.dims[1];
  const std::size_t width = onehot_code_bits(num_classes);
  if (c.bytes.size() != (n * width + 7) / 8) throw CorruptionError("onehot_codes: payload size");
  LabelVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t v = 0;
    for (std::size_t b = 0; b < width; ++b) {
      const std::size_t bit = i * width + b;
      v |= static_cast<std::uint32_t>((c.bytes[bit / 8] >> (bit % 8)) & 1u) << b;
    }
    if (v >= num_classes) throw CorruptionError("onehot_codes: class index out of range");
    out[i] = static_cast<Label>(v);
  }
  return out;
}

Container binary_codes_container(const BinaryCodeMatrix& codes) {
  Container c;
  c.kind = ContainerKind::kBinaryCodes;
  c.dims = {static_cast<std::uint32_t>(codes.count), static_cast<std::uint32_t>(codes.bits)};
  c.bytes = codes.data;
  return c;
}

BinaryCodeMatrix binary_codes_from_container(const Container& c) {
  expect(c, ContainerKind::kBinaryCodes, 2);
  BinaryCodeMatrix m{c.dims[0], c.dims[1], c.bytes};
  if (m.data.size() != m.count * m.code_bytes()) throw CorruptionError("binary_codes: payload size");
  return m;
}

Container pq_codes_container(const PqCodeMatrix& codes) {
  Container c;
  c.kind = ContainerKind::kPqCodes;
  c.dims = {static_cast<std::uint32_t>(codes.count), static_cast<std::uint32_t>(codes.m)};
  c.bytes.reserve(codes.data.size() * 2);
  for (std::uint16_t v : codes.data) {
    c.bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
    c.bytes.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  return c;
}

PqCodeMatrix pq_codes_from_container(const Container& c) {
  expect(c, ContainerKind::kPqCodes, 2);
  PqCodeMatrix m{c.dims[0], c.dims[1], {}};
  if (c.bytes.size() != m.count * m.m * 2) throw CorruptionError("pq_codes: payload size");
  m.data.resize(m.count * m.m);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    m.data[i] = static_cast<std::uint16_t>(c.bytes[2 * i] | (c.bytes[2 * i + 1] << 8));
  }
  return m;
}

}  // namespace hashbench
