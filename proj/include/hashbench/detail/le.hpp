#pragma once

// Little-endian scalar encoding shared by the binary file formats.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

namespace hashbench::detail {

template <class T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> buf;
  std::memcpy(buf.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf.begin(), buf.end());
  }
  out.write(buf.data(), sizeof(T));
}

/// Returns false on a short read.
template <class T>
bool read_le(std::istream& in, T& value) {
  std::array<char, sizeof(T)> buf;
  if (!in.read(buf.data(), sizeof(T))) return false;
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf.begin(), buf.end());
  }
  std::memcpy(&value, buf.data(), sizeof(T));
  return true;
}

}  // namespace hashbench::detail
