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

#include <algorithm>

#include "ops/bytes.h"
#include "ops/error.h"
#include "ops/wire_format.h"

namespace ops {

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::kMalformed, "odd hex length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kMalformed, "bad hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string_view error_message(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kBadKeyMaterial: return "bad key material";
    case ErrorCode::kUnencodable: return "unencodable";
    case ErrorCode::kMalformed: return "malformed";
    case ErrorCode::kWrongKind: return "wrong kind";
    case ErrorCode::kTrailingBytes: return "trailing bytes";
    case ErrorCode::kAlreadyInitialized: return "already initialized";
    case ErrorCode::kNotInitialized: return "not initialized";
    case ErrorCode::kInvalidCertificate: return "invalid certificate";
    case ErrorCode::kCertificateNotMine: return "certificate not mine";
    case ErrorCode::kNotActivated: return "not activated";
    case ErrorCode::kCounterOutOfSync: return "counter out of sync";
    case ErrorCode::kInvalidConfirmation: return "invalid confirmation";
    case ErrorCode::kInsufficientOfflineFunds: return "insufficient offline funds";
    case ErrorCode::kInvalidAmount: return "invalid amount";
    case ErrorCode::kBadReceiver: return "bad receiver";
    case ErrorCode::kAlreadyCollected: return "already collected";
    case ErrorCode::kNotAddressedToMe: return "not addressed to me";
    case ErrorCode::kInvalidPayment: return "invalid payment";
    case ErrorCode::kRollbackDetected: return "rollback detected";
    case ErrorCode::kTamperDetected: return "tamper detected";
    case ErrorCode::kCounterOverflow: return "counter overflow";
    case ErrorCode::kNothingToReissue: return "nothing to reissue";
    case ErrorCode::kCrashed: return "crashed";
    case ErrorCode::kAlreadyRegistered: return "already registered";
    case ErrorCode::kUnknownOrProvisioned: return "unknown or already-provisioned client";
    case ErrorCode::kAttestationRejected: return "attestation rejected";
    case ErrorCode::kInsufficientOnlineFunds: return "insufficient online funds";
    case ErrorCode::kNoTaRegistered: return "no TA registered";
    case ErrorCode::kUnauthenticated: return "unauthenticated";
    case ErrorCode::kMustBeCollected: return "must be collected, not claimed";
    case ErrorCode::kAlreadyClaimed: return "already claimed";
    case ErrorCode::kUnknownReceiver: return "unknown receiver";
    case ErrorCode::kUnknownAccount: return "unknown account";
    case ErrorCode::kCorruptState: return "corrupt state";
    case ErrorCode::kReplayedRequest: return "replayed request";
    case ErrorCode::kUnexpectedMessage: return "unexpected message";
    case ErrorCode::kNoTa: return "no TA";
    case ErrorCode::kBadServerCert: return "bad server cert";
    case ErrorCode::kActivationFailed: return "activation failed";
    case ErrorCode::kWrongReceiver: return "wrong receiver";
    case ErrorCode::kAmountMismatch: return "amount mismatch";
    case ErrorCode::kReplayedPayment: return "replayed payment";
    case ErrorCode::kNotRegistered: return "not registered";
    case ErrorCode::kOffline: return "offline";
    case ErrorCode::kNoResponse: return "no response";
    case ErrorCode::kOperationPending: return "operation pending";
    case ErrorCode::kScript: return "script error";
  }
  return "unknown error";
}

bool is_known_error_code(std::uint8_t value) {
  return value != 0 &&
         error_message(static_cast<ErrorCode>(value)) != "unknown error";
}

Writer& Writer::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

Writer& Writer::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

Writer& Writer::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

Writer& Writer::bytes(ByteView v) {
  if (v.size() > 0xffffffffu) throw Error(ErrorCode::kUnencodable, "field too long");
  u32(static_cast<std::uint32_t>(v.size()));
  return raw(v);
}

Writer& Writer::raw(ByteView v) {
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

ByteView Reader::raw(std::size_t n) {
  if (remaining() < n) throw Error(ErrorCode::kMalformed, "truncated");
  ByteView v = in_.subspan(pos_, n);
  pos_ += n;
  return v;
}

std::uint8_t Reader::u8() { return raw(1)[0]; }

std::uint32_t Reader::u32() {
  ByteView v = raw(4);
  std::uint32_t out = 0;
  for (std::uint8_t b : v) out = (out << 8) | b;
  return out;
}

std::uint64_t Reader::u64() {
  ByteView v = raw(8);
  std::uint64_t out = 0;
  for (std::uint8_t b : v) out = (out << 8) | b;
  return out;
}

Bytes Reader::bytes() {
  std::uint32_t len = u32();
  ByteView v = raw(len);
  return Bytes(v.begin(), v.end());
}

std::string Reader::str() {
  std::uint32_t len = u32();
  ByteView v = raw(len);
  return std::string(v.begin(), v.end());
}

bool Reader::flag() {
  std::uint8_t v = u8();
  if (v > 1) throw Error(ErrorCode::kMalformed, "flag out of range");
  return v == 1;
}

void Reader::expect_done() const {
  if (!done()) throw Error(ErrorCode::kTrailingBytes);
}

}  // namespace ops
