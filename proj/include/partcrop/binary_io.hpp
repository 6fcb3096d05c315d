#pragma once

// Little-endian primitive readers/writers shared by the PCF1 and PCAT formats.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "partcrop/errors.hpp"

namespace partcrop::binary {

template <typename U>
void put_le(std::ostream& out, U value) {
  char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(bytes, sizeof(U));
}

template <typename U>
U get_le(std::istream& in) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw FormatError("unexpected end of file");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

inline void put_f32(std::ostream& out, double v) {
  put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

inline double get_f32(std::istream& in) {
  return static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in)));
}

inline void put_magic(std::ostream& out, std::string_view magic) { out.write(magic.data(), 4); }

inline void expect_magic(std::istream& in, std::string_view magic) {
  char buf[4];
  if (!in.read(buf, 4) || std::string_view(buf, 4) != magic) {
    throw FormatError("bad magic, expected '" + std::string(magic) + "'");
  }
}

}  // namespace partcrop::binary
