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

#ifndef OPS_MESSAGES_H_
#define OPS_MESSAGES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ops/crypto.h"
#include "ops/error.h"
#include "ops/types.h"

namespace ops {

// Wire tags. The tag is the first byte of every encoded message.
enum class MsgKind : std::uint8_t {
  kClientRegister = 1,
  kClientRegisterAck = 2,
  kTaRegister = 3,
  kTaRegisterAck = 4,
  kDepositReq = 5,
  kDepositConfirmed = 6,
  kWithdrawReq = 7,
  kWithdrawConfirmed = 8,
  kPayReq = 9,
  kPaymentTransfer = 10,
  kPayConfirmed = 11,
  kClaimReq = 12,
  kClaimConfirmed = 13,
  kRejected = 14,
};

std::string_view msg_kind_name(MsgKind kind);
std::optional<MsgKind> parse_msg_kind(std::string_view name);

struct ClientRegister {
  crypto::VerificationKey ua_vk;
  bool operator==(const ClientRegister&) const = default;
};

struct ClientRegisterAck {
  Certificate cert;
  bool operator==(const ClientRegisterAck&) const = default;
};

// The device certificate and model travel with the request so the server
// can check the device key against its OEM roots.
struct TaRegister {
  crypto::VerificationKey device_vk;
  std::string model;
  crypto::Signature device_cert;
  crypto::VerificationKey ta_vk;
  crypto::VerificationKey ua_vk;
  crypto::Signature attestation;
  bool operator==(const TaRegister&) const = default;
};

struct TaRegisterAck {
  Certificate cert;
  bool operator==(const TaRegisterAck&) const = default;
};

struct DepositReq {
  Amount amount = 0;
  bool operator==(const DepositReq&) const = default;
};

struct DepositConfirmed {
  Amount amount = 0;
  std::uint64_t id = 0;
  crypto::Signature sig;
  bool operator==(const DepositConfirmed&) const = default;
};

struct WithdrawReq {
  Amount amount = 0;
  std::uint64_t id = 0;
  crypto::Signature sig;
  bool operator==(const WithdrawReq&) const = default;
};

struct WithdrawConfirmed {
  bool operator==(const WithdrawConfirmed&) const = default;
};

struct PayReq {
  Amount amount = 0;
  Certificate receiver;
  bool operator==(const PayReq&) const = default;
};

struct PaymentTransfer {
  Payment payment;
  bool operator==(const PaymentTransfer&) const = default;
};

struct PayConfirmed {
  bool operator==(const PayConfirmed&) const = default;
};

struct ClaimReq {
  Payment payment;
  bool operator==(const ClaimReq&) const = default;
};

struct ClaimConfirmed {
  bool operator==(const ClaimConfirmed&) const = default;
};

// Server-side abort, reported back to the caller.
struct Rejected {
  ErrorCode code = ErrorCode::kOk;
  std::string reason;
  bool operator==(const Rejected&) const = default;
};

// Alternative index + 1 == MsgKind value.
using MessageBody =
    std::variant<ClientRegister, ClientRegisterAck, TaRegister, TaRegisterAck,
                 DepositReq, DepositConfirmed, WithdrawReq, WithdrawConfirmed,
                 PayReq, PaymentTransfer, PayConfirmed, ClaimReq,
                 ClaimConfirmed, Rejected>;

// Signature by the sender's UA key over (kind, body, nonce).
struct AuthEnvelope {
  crypto::VerificationKey sender_vk;
  std::uint64_t nonce = 0;
  crypto::Signature sig;
  bool operator==(const AuthEnvelope&) const = default;
};

struct WireMessage {
  MessageBody body;
  std::optional<AuthEnvelope> auth;

  MsgKind kind() const { return static_cast<MsgKind>(body.index() + 1); }
  bool operator==(const WireMessage&) const = default;
};

inline bool is_server_bound(MsgKind kind) {
  switch (kind) {
    case MsgKind::kClientRegister:
    case MsgKind::kTaRegister:
    case MsgKind::kDepositReq:
    case MsgKind::kWithdrawReq:
    case MsgKind::kClaimReq:
      return true;
    default:
      return false;
  }
}

}  // namespace ops

#endif  // OPS_MESSAGES_H_
