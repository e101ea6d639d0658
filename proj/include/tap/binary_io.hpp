// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_BINARY_IO_HPP_
#define TAP_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "tap/error.hpp"

namespace tap {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written in host order; big-endian hosts "
              "need byte swapping");

// Append-only little-endian byte buffer.
class ByteWriter {
 public:
  template <typename T>
  void Put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void PutMagic(std::string_view magic) {
    bytes_.insert(bytes_.end(), magic.begin(), magic.end());
  }
  void PutDoubles(const std::vector<double>& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(v.data());
    bytes_.insert(bytes_.end(), p, p + v.size() * sizeof(double));
  }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& bytes)
      : bytes_(bytes) {}

  template <typename T>
  T Get() {
    static_assert(std::is_trivially_copyable_v<T>);
    Need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  bool MagicIs(std::string_view magic) {
    Need(magic.size());
    bool ok = std::memcmp(bytes_.data() + pos_, magic.data(), magic.size()) == 0;
    pos_ += magic.size();
    return ok;
  }
  std::vector<double> GetDoubles(std::size_t n) {
    if (n > (bytes_.size() - pos_) / sizeof(double))
      throw FormatError("truncated data block");
    std::vector<double> v(n);
    std::memcpy(v.data(), bytes_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }
  void Skip(std::size_t n) {
    Need(n);
    pos_ += n;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("unexpected end of file");
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path,
                    const std::vector<std::uint8_t>& bytes);

}  // namespace tap

#endif  // TAP_BINARY_IO_HPP_
