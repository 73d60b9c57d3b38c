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

// The OPS trusted application. Every method loads its state from the secure
// store, works on a copy, and persists before releasing any output, so a
// rolled-back blob is caught before a balance can change.

#ifndef OPS_TA_H_
#define OPS_TA_H_

#include <cstdint>
#include <optional>
#include <random>
#include <set>

#include "ops/crypto.h"
#include "ops/device.h"
#include "ops/secure_store.h"
#include "ops/types.h"

namespace ops::ta {

struct WithdrawConfirmation {
  Amount amount = 0;
  std::uint64_t id = 0;
  crypto::Signature sig;
  bool operator==(const WithdrawConfirmation&) const = default;
};

struct BalanceAttestation {
  Amount bal = 0;
  std::uint64_t id = 0;
  crypto::Signature sig;
};

struct LastWithdraw {
  Amount amount = 0;
  std::uint64_t id = 0;
  bool operator==(const LastWithdraw&) const = default;
};

struct TAState {
  crypto::KeyPair keys;
  Amount bal = 0;
  std::optional<Certificate> cert;
  std::set<PaymentKey> iplog;
  std::uint64_t id = 0;
  std::uint64_t pid = 0;
  // The most recent withdraw, while it is still the latest counter bump.
  std::optional<LastWithdraw> last_withdraw;
};

Bytes encode_state(const TAState& state);
// Throws kMalformed / kTrailingBytes.
TAState decode_state(ByteView bytes);

enum class CrashPoint : std::uint8_t {
  kNone = 0,
  kDepositBeforePersist,
  kWithdrawAfterPersist,
  kPayAfterPersist,
  kCollectBeforePersist,
};

struct InitResult {
  crypto::VerificationKey vk;
  crypto::Signature attestation;
};

class TrustedApp {
 public:
  TrustedApp(crypto::VerificationKey server_vk, SecureStore store)
      : server_vk_(server_vk), store_(std::move(store)) {}

  InitResult init(const wallet::DeviceIdentity& device, std::mt19937_64& rng);
  void cert_init(const Certificate& cert);
  void deposit(Amount x, std::uint64_t id, const crypto::Signature& server_sig);
  WithdrawConfirmation withdraw(Amount x);
  // Re-signs the confirmation of the last withdraw if no deposit or withdraw
  // happened since. Lets the client recover a confirmation lost after the
  // debit was persisted; the server's counter still admits it only once.
  WithdrawConfirmation reissue_withdraw();
  Payment pay(Amount x, const Certificate& receiver,
              std::optional<std::uint64_t> created_at = std::nullopt);
  void collect(const Payment& p);
  BalanceAttestation get_balance() const;

  TAState store_read() const;
  void store_write(const TAState& state);

  // One-shot fault injection for the next method that reaches `point`.
  void arm_crash(CrashPoint point) { crash_ = point; }

  const crypto::VerificationKey& server_vk() const { return server_vk_; }
  SecureStore& store() { return store_; }
  const SecureStore& store() const { return store_; }

 private:
  TAState load_activated() const;
  void maybe_crash(CrashPoint point);

  crypto::VerificationKey server_vk_;
  SecureStore store_;
  CrashPoint crash_ = CrashPoint::kNone;
};

}  // namespace ops::ta

#endif  // OPS_TA_H_
