/*
 * Copyright 2026 The OPS Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Primitive canonical encoding shared by every signed structure, wire message
// and on-disk file:
//
//   u8          one byte
//   u32 / u64   fixed-width big-endian
//   bytes       u32 length prefix followed by the raw bytes
//   string      same as bytes (UTF-8, not NUL-terminated)
//
// Structures emit their fields in declaration order with no padding.

#ifndef OPS_WIRE_FORMAT_H_
#define OPS_WIRE_FORMAT_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "ops/bytes.h"
#include "ops/error.h"

namespace ops {

class Writer {
 public:
  Writer& u8(std::uint8_t v);
  Writer& u32(std::uint32_t v);
  Writer& u64(std::uint64_t v);
  Writer& bytes(ByteView v);
  Writer& str(std::string_view v) { return bytes(as_bytes(v)); }
  // No length prefix. Only for magic numbers and nested pre-encoded records.
  Writer& raw(ByteView v);

  template <std::size_t N>
  Writer& fixed(const std::array<std::uint8_t, N>& v) {
    return bytes(ByteView(v.data(), v.size()));
  }

  const Bytes& data() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

// Every read failure throws Error(kMalformed).
class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  Bytes bytes();
  std::string str();
  ByteView raw(std::size_t n);
  bool flag();

  // Length-prefixed field that must be exactly N bytes long.
  template <std::size_t N>
  std::array<std::uint8_t, N> fixed() {
    std::uint32_t len = u32();
    if (len != N) throw Error(ErrorCode::kMalformed, "fixed field length");
    ByteView v = raw(N);
    std::array<std::uint8_t, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }

  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }
  // Throws Error(kTrailingBytes) unless the input is fully consumed.
  void expect_done() const;

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace ops

#endif  // OPS_WIRE_FORMAT_H_
