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

// Client-side untrusted application: the sender and receiver halves of every
// protocol, plus the receiver's payment log.

#ifndef OPS_WALLET_H_
#define OPS_WALLET_H_

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "ops/bytes.h"
#include "ops/certs.h"
#include "ops/crypto.h"
#include "ops/device.h"
#include "ops/messages.h"
#include "ops/ta.h"
#include "ops/types.h"

namespace ops::wallet {

using ops::pay_verify;

// Request/response transport to the server. nullopt means no response
// arrived; the request may or may not have been processed.
class ServerLink {
 public:
  virtual ~ServerLink() = default;
  virtual std::optional<Bytes> call(ByteView request) = 0;
};

enum class PendingOp : std::uint8_t { kDeposit = 1, kWithdraw = 2, kClaim = 3 };

// A server request whose outcome is not yet known. It is resent verbatim
// until a response arrives.
struct PendingRequest {
  PendingOp op = PendingOp::kDeposit;
  Bytes frame;
  bool operator==(const PendingRequest&) const = default;
};

enum class WalletCrash : std::uint8_t { kNone = 0, kWithdrawBeforeSend };

struct WalletState {
  crypto::KeyPair keys;
  std::optional<Certificate> cert;
  std::optional<Certificate> ta_cert;
  std::set<PaymentKey> iplog;
  // Accepted payments awaiting claim or collect.
  std::vector<Payment> inbox;
  // Redeemed payments.
  std::vector<Payment> archive;
  // Payments this wallet released, for reconciliation.
  std::vector<Payment> sent;
  std::uint64_t nonce = 0;
  std::optional<PendingRequest> pending;
  // Set when the TA debited a withdraw but its confirmation never left it.
  bool withdraw_needs_reissue = false;
};

struct Acceptance {
  bool accepted = false;
  ErrorCode reason = ErrorCode::kOk;
};

class Wallet {
 public:
  Wallet(crypto::KeyPair keys, crypto::VerificationKey server_vk);
  static Wallet create(std::mt19937_64& rng, crypto::VerificationKey server_vk);

  void setup_client(ServerLink& link);
  void setup_ta(ServerLink& link, const DeviceIdentity& device,
                std::mt19937_64& rng);

  // Completes an interrupted deposit, withdraw or claim. No-op when nothing
  // is outstanding. Throws kNoResponse if the server still does not answer.
  void resume(ServerLink& link);

  void do_deposit(ServerLink& link, Amount x);
  void do_withdraw(ServerLink& link, Amount x);

  PayReq request_payment(Amount x) const;
  // Offline: never touches a server link.
  Payment make_payment(const PayReq& req,
                       std::optional<std::uint64_t> now = std::nullopt);
  Acceptance accept_payment(const Payment& p, const PayReq& expected);

  // Claims every UA-addressed payment in the inbox. Returns the number
  // credited (including ones the server reports as already claimed).
  std::size_t do_claim(ServerLink& link);
  std::size_t do_claim(ServerLink& link, const Payment& p);
  // Credits TA-addressed inbox payments into this wallet's TA.
  std::size_t collect_pending();

  // The certificate this wallet presents as a payment receiver.
  const Certificate& presented_cert() const;
  bool registered() const { return state_.cert.has_value(); }
  bool activated() const { return state_.ta_cert.has_value(); }

  void arm_crash(WalletCrash point) { crash_ = point; }

  const WalletState& state() const { return state_; }
  const crypto::VerificationKey& vk() const { return state_.keys.vk; }
  const crypto::VerificationKey& server_vk() const { return server_vk_; }
  ta::TrustedApp* ta() { return ta_ ? &*ta_ : nullptr; }
  const ta::TrustedApp* ta() const { return ta_ ? &*ta_ : nullptr; }
  void attach_ta(ta::TrustedApp ta) { ta_ = std::move(ta); }

  // Builds an authenticated request with the next nonce.
  Bytes sign_request(MessageBody body);

  // Snapshot: "OPSW" | u8 version | state | sha256. The TA lives in its own
  // secure store and is not included.
  Bytes snapshot() const;
  static Wallet from_snapshot(ByteView bytes, crypto::VerificationKey server_vk);

 private:
  WireMessage exchange(ServerLink& link, ByteView frame);
  void send_pending(ServerLink& link);
  void complete(const WireMessage& response);
  void send_withdraw(ServerLink& link, const ta::WithdrawConfirmation& conf);
  void archive_payment(const PaymentKey& key);

  WalletState state_;
  crypto::VerificationKey server_vk_;
  std::optional<ta::TrustedApp> ta_;
  WalletCrash crash_ = WalletCrash::kNone;
};

}  // namespace ops::wallet

#endif  // OPS_WALLET_H_
