#include "hashbench/container.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "hashbench/detail/le.hpp"
#include "hashbench/error.hpp"

namespace hashbench {

namespace {

constexpr std::uint32_t kMaxDims = 64;

bool known_kind(std::uint32_t k) {
  switch (static_cast<ContainerKind>(k)) {
    case ContainerKind::kTightFrame:
    case ContainerKind::kPqCodebook:
    case ContainerKind::kSoftmaxModel:
    case ContainerKind::kAnchorMap:
    case ContainerKind::kMlpHead:
    case ContainerKind::kBinaryCodes:
    case ContainerKind::kPqCodes:
    case ContainerKind::kOneHotCodes:
      return true;
  }
  return false;
}

}  // namespace

PayloadType payload_type(ContainerKind kind) {
  return static_cast<std::uint32_t>(kind) >= 16 ? PayloadType::kBytes : PayloadType::kFloat32;
}

std::string_view kind_name(ContainerKind kind) {
  switch (kind) {
    case ContainerKind::kTightFrame: return "tight_frame";
    case ContainerKind::kPqCodebook: return "pq_codebook";
    case ContainerKind::kSoftmaxModel: return "softmax_model";
    case ContainerKind::kAnchorMap: return "anchor_map";
    case ContainerKind::kMlpHead: return "mlp_head";
    case ContainerKind::kBinaryCodes: return "binary_codes";
    case ContainerKind::kPqCodes: return "pq_codes";
    case ContainerKind::kOneHotCodes: return "onehot_codes";
  }
  return "unknown";
}

void write_container(std::ostream& out, const Container& c) {
  out.write(kContainerMagic.data(), static_cast<std::streamsize>(kContainerMagic.size()));
  detail::write_le(out, static_cast<std::uint32_t>(c.kind));
  detail::write_le(out, static_cast<std::uint32_t>(c.dims.size()));
  for (auto d : c.dims) detail::write_le(out, d);
  detail::write_le(out, c.seed);
  if (payload_type(c.kind) == PayloadType::kFloat32) {
    detail::write_le(out, static_cast<std::uint64_t>(c.floats.size()));
    for (float v : c.floats) detail::write_le(out, v);
  } else {
    detail::write_le(out, static_cast<std::uint64_t>(c.bytes.size()));
    out.write(reinterpret_cast<const char*>(c.bytes.data()),
              static_cast<std::streamsize>(c.bytes.size()));
  }
  if (!out) throw Error("container write failed");
}

Container read_container(std::istream& in) {
  std::string magic(kContainerMagic.size(), '\0');
  if (!in.read(magic.data(), static_cast<std::streamsize>(magic.size())) ||
      magic != kContainerMagic) {
    throw FormatError("bad container magic (expected HBCODEC1)");
  }
  Container c;
  std::uint32_t kind = 0, ndims = 0;
  if (!detail::read_le(in, kind) || !known_kind(kind)) {
    throw FormatError("unknown container kind " + std::to_string(kind));
  }
  c.kind = static_cast<ContainerKind>(kind);
  if (!detail::read_le(in, ndims) || ndims > kMaxDims) throw FormatError("bad container dims");
  c.dims.resize(ndims);
  for (auto& d : c.dims) {
    if (!detail::read_le(in, d)) throw FormatError("truncated container dims");
  }
  std::uint64_t count = 0;
  if (!detail::read_le(in, c.seed) || !detail::read_le(in, count)) {
    throw FormatError("truncated container header");
  }
  if (payload_type(c.kind) == PayloadType::kFloat32) {
    c.floats.resize(count);
    for (auto& v : c.floats) {
      if (!detail::read_le(in, v)) throw FormatError("truncated container payload");
    }
  } else {
    c.bytes.resize(count);
    if (!in.read(reinterpret_cast<char*>(c.bytes.data()), static_cast<std::streamsize>(count))) {
      throw FormatError("truncated container payload");
    }
  }
  return c;
}

void save_containers(const std::string& path, const std::vector<Container>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (const auto& r : records) write_container(out, r);
}

std::vector<Container> load_containers(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<Container> out;
  while (in.peek() != std::char_traits<char>::eof()) out.push_back(read_container(in));
  if (out.empty()) throw FormatError(path + ": no container records");
  return out;
}

}  // namespace hashbench
