#pragma once

// Little-endian byte writer/reader shared by the sketch and hypercube formats.

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reach/errors.hpp"

namespace reach {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put_le(v, 2); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }

  void raw(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  void raw(std::string_view bytes) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data());
    out_.insert(out_.end(), p, p + bytes.size());
  }

  void u32_array(std::span<const std::uint32_t> values) {
    out_.reserve(out_.size() + values.size() * 4);
    for (const auto v : values) u32(v);
  }

  // u16 length prefix + bytes.
  void short_string(std::string_view s) {
    if (s.size() > 0xFFFF) throw ContractError("string longer than 65535 bytes: " + std::string(s.substr(0, 32)));
    u16(static_cast<std::uint16_t>(s.size()));
    raw(s);
  }

  [[nodiscard]] std::size_t size() const noexcept { return out_.size(); }
  [[nodiscard]] const std::vector<std::uint8_t>& bytes() const& noexcept { return out_; }
  [[nodiscard]] std::vector<std::uint8_t> take() && noexcept { return std::move(out_); }

 private:
  void put_le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> out_;
};

// Every read checks bounds and throws FormatError carrying the offset.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) noexcept : bytes_(bytes) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1, "u8")); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get_le(2, "u16")); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4, "u32")); }
  std::uint64_t u64() { return get_le(8, "u64"); }

  std::span<const std::uint8_t> raw(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::vector<std::uint32_t> u32_array(std::size_t n, const char* what) {
    const auto s = raw(n * 4, what);
    std::vector<std::uint32_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = static_cast<std::uint32_t>(s[4 * i]) | (static_cast<std::uint32_t>(s[4 * i + 1]) << 8) |
               (static_cast<std::uint32_t>(s[4 * i + 2]) << 16) | (static_cast<std::uint32_t>(s[4 * i + 3]) << 24);
    }
    return out;
  }

  std::string short_string(const char* what) {
    const std::uint16_t n = u16();
    const auto s = raw(n, what);
    return {reinterpret_cast<const char*>(s.data()), s.size()};
  }

  [[nodiscard]] std::size_t offset() const noexcept { return pos_; }
  [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  [[nodiscard]] bool at_end() const noexcept { return pos_ == bytes_.size(); }

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(pos_, what); }
  [[noreturn]] void fail_at(std::size_t offset, const std::string& what) const { throw FormatError(offset, what); }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(pos_, std::string("truncated input reading ") + what);
    }
  }

  std::uint64_t get_le(int width, const char* what) {
    need(static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace reach
