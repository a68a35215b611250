#include "steerkit/io.hpp"

#include <fstream>
#include <iterator>

#include <openssl/sha.h>

namespace steerkit {

void ByteReader::expect_magic(std::string_view m) {
  need(m.size());
  if (std::memcmp(bytes_.data() + pos_, m.data(), m.size()) != 0)
    throw Error("bad magic: expected " + std::string(m));
  pos_ += m.size();
}

std::uint8_t ByteReader::u8() {
  need(1);
  return bytes_[pos_++];
}

void ByteReader::need(std::size_t n) const {
  if (pos_ + n > end_) throw Error("truncated input");
}

std::array<std::uint8_t, 32> sha256(const std::uint8_t* data, std::size_t size) {
  std::array<std::uint8_t, 32> out{};
  SHA256(data, size, out.data());
  return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path);
}

}  // namespace steerkit
