#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "naryq/error.hpp"

namespace naryq::detail {

// Little-endian scalar IO.  The build targets LE hosts; the static_assert
// keeps a port honest.
static_assert(std::endian::native == std::endian::little,
              "containers are little-endian");

inline void write_bytes(std::ostream& out, const void* p, std::size_t size) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(size));
}

inline void read_bytes(std::istream& in, void* p, std::size_t size) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(size));
  if (!in) throw_data("unexpected end of file");
}

template <typename T>
void write_scalar(std::ostream& out, T value) {
  write_bytes(out, &value, sizeof(T));
}

template <typename T>
T read_scalar(std::istream& in) {
  T value;
  read_bytes(in, &value, sizeof(T));
  return value;
}

inline void write_magic(std::ostream& out, const char* magic) {
  out.write(magic, static_cast<std::streamsize>(std::strlen(magic)));
}

inline void expect_magic(std::istream& in, const char* magic,
                         const std::string& what) {
  const std::size_t len = std::strlen(magic);
  char buf[16] = {};
  in.read(buf, static_cast<std::streamsize>(len));
  if (!in || std::memcmp(buf, magic, len) != 0)
    throw_data("not a " + what + " file");
}

} // namespace naryq::detail
