#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "mdlite/error.h"

namespace mdlite {

/// Little-endian byte sink.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u64(s.size());
    buf_.append(s);
  }
  void raw(std::string_view s) { buf_.append(s); }
  void f64s(const std::vector<double>& v) {
    u64(v.size());
    for (double d : v) f64(d);
  }

  std::size_t size() const { return buf_.size(); }
  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

/// Little-endian byte source. Any read past the end throws
/// E-CORRUPT-RESTART carrying the failing offset.
class ByteReader {
 public:
  /// `base` is added to reported offsets, for readers over a sub-range.
  explicit ByteReader(std::string_view data, std::size_t base = 0) : data_(data), base_(base) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::size_t at = offset();
    const std::uint64_t n = u64();
    if (n > remaining()) fail(at, "string length exceeds stream");
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    std::string_view s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<double> f64s() {
    const std::size_t at = offset();
    const std::uint64_t n = u64();
    if (n > remaining() / 8) fail(at, "array length exceeds stream");
    std::vector<double> v(n);
    for (auto& d : v) d = f64();
    return v;
  }

  std::size_t offset() const { return base_ + pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool at_end() const { return pos_ == data_.size(); }

  [[noreturn]] void fail(std::size_t offset, std::string_view what) const;

 private:
  void need(std::size_t n) const {
    if (n > remaining()) fail(offset(), "unexpected end of stream");
  }

  std::string_view data_;
  std::size_t base_ = 0;
  std::size_t pos_ = 0;
};

/// Carries the byte offset in the message.
class CorruptRestart : public EngineError {
 public:
  CorruptRestart(std::size_t offset, std::string_view what);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace mdlite
