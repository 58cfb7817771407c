#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hashbench {

/// Kind tag stored after the magic string.
enum class ContainerKind : std::uint32_t {
  kTightFrame = 1,
  kPqCodebook = 2,
  kSoftmaxModel = 3,
  kAnchorMap = 4,
  kMlpHead = 5,
  kBinaryCodes = 16,
  kPqCodes = 17,
  kOneHotCodes = 18,
};

/// Element type of the payload, implied by the kind: parameter containers
/// carry float32, code containers carry raw bytes.
enum class PayloadType : std::uint32_t { kFloat32 = 0, kBytes = 1 };

PayloadType payload_type(ContainerKind kind);
std::string_view kind_name(ContainerKind kind);

/// Self-describing binary record:
///
///   "HBCODEC1" | u32 kind | u32 ndims | u32 dims[ndims] | u32 seed |
///   u64 payload_count | payload
///
/// All integers little-endian. The payload is row-major float32 (parameter
/// kinds) or raw bytes (code kinds). Several records may be concatenated in
/// one file.
struct Container {
  ContainerKind kind = ContainerKind::kTightFrame;
  std::vector<std::uint32_t> dims;
  std::uint32_t seed = 0;
  std::vector<float> floats;
  std::vector<std::uint8_t> bytes;
};

inline constexpr std::string_view kContainerMagic = "HBCODEC1";

void write_container(std::ostream& out, const Container& c);
/// Throws FormatError on bad magic, unknown kind or truncation.
Container read_container(std::istream& in);

void save_containers(const std::string& path, const std::vector<Container>& records);
std::vector<Container> load_containers(const std::string& path);

}  // namespace hashbench
