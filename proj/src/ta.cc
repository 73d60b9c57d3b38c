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

#include "ops/ta.h"

#include <limits>

#include "ops/certs.h"
#include "ops/codec.h"
#include "ops/error.h"
#include "ops/wire_format.h"

namespace ops::ta {
namespace {

constexpr std::uint8_t kStateVersion = 1;
constexpr std::uint64_t kCounterMax = std::numeric_limits<std::uint64_t>::max();

void require_positive(Amount x) {
  if (x == 0) throw Error(ErrorCode::kInvalidAmount, "amount must be >= 1");
}

void require_room(Amount bal, Amount x) {
  if (bal > std::numeric_limits<Amount>::max() - x) {
    throw Error(ErrorCode::kInvalidAmount, "balance overflow");
  }
}

}  // namespace

Bytes encode_state(const TAState& state) {
  Writer w;
  w.u8(kStateVersion);
  w.fixed(state.keys.sk.expanded());
  w.fixed(state.keys.vk.bytes);
  w.u64(state.bal);
  w.u8(state.cert ? 1 : 0);
  if (state.cert) codec::write_certificate(w, *state.cert);
  w.u32(static_cast<std::uint32_t>(state.iplog.size()));
  for (const PaymentKey& key : state.iplog) codec::write_payment_key(w, key);
  w.u64(state.id).u64(state.pid);
  w.u8(state.last_withdraw ? 1 : 0);
  if (state.last_withdraw) {
    w.u64(state.last_withdraw->amount).u64(state.last_withdraw->id);
  }
  return std::move(w).take();
}

TAState decode_state(ByteView bytes) {
  Reader r(bytes);
  if (r.u8() != kStateVersion) throw Error(ErrorCode::kMalformed, "state version");
  TAState state;
  state.keys.sk = crypto::SigningKey::from_expanded(r.fixed<64>());
  state.keys.vk = codec::read_vk(r);
  if (state.keys.vk != state.keys.sk.verification_key()) {
    throw Error(ErrorCode::kMalformed, "key pair mismatch");
  }
  state.bal = r.u64();
  if (r.flag()) state.cert = codec::read_certificate(r);
  std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    state.iplog.insert(codec::read_payment_key(r));
  }
  state.id = r.u64();
  state.pid = r.u64();
  if (r.flag()) {
    LastWithdraw lw;
    lw.amount = r.u64();
    lw.id = r.u64();
    state.last_withdraw = lw;
  }
  r.expect_done();
  return state;
}

TAState TrustedApp::store_read() const { return decode_state(store_.read()); }

void TrustedApp::store_write(const TAState& state) {
  store_.write(encode_state(state));
}

TAState TrustedApp::load_activated() const {
  TAState state = store_read();
  if (!state.cert) throw Error(ErrorCode::kNotActivated);
  return state;
}

void TrustedApp::maybe_crash(CrashPoint point) {
  if (crash_ == point) {
    crash_ = CrashPoint::kNone;
    throw Error(ErrorCode::kCrashed);
  }
}

InitResult TrustedApp::init(const wallet::DeviceIdentity& device,
                            std::mt19937_64& rng) {
  if (!store_.empty()) throw Error(ErrorCode::kAlreadyInitialized);
  TAState state;
  state.keys = crypto::keygen(crypto::SecurityConfig::standard(), rng);
  crypto::Signature attestation = wallet::tos_attest(device, state.keys.vk);
  store_write(state);
  return {state.keys.vk, attestation};
}

void TrustedApp::cert_init(const Certificate& cert) {
  TAState state = store_read();
  if (!crypto::hw_cert_verify(cert, server_vk_)) {
    throw Error(ErrorCode::kInvalidCertificate);
  }
  if (cert.vk != state.keys.vk) throw Error(ErrorCode::kCertificateNotMine);
  state.cert = cert;
  store_write(state);
}

void TrustedApp::deposit(Amount x, std::uint64_t id,
                         const crypto::Signature& server_sig) {
  TAState state = load_activated();
  require_positive(x);
  if (state.id == kCounterMax) throw Error(ErrorCode::kCounterOverflow);
  if (id != state.id + 1) throw Error(ErrorCode::kCounterOutOfSync);
  if (!crypto::sig_verify(codec::deposit_confirmation_bytes(state.keys.vk, x, id),
                          server_sig, server_vk_)) {
    throw Error(ErrorCode::kInvalidConfirmation);
  }
  require_room(state.bal, x);
  maybe_crash(CrashPoint::kDepositBeforePersist);
  state.bal += x;
  state.id += 1;
  state.last_withdraw.reset();
  store_write(state);
}

WithdrawConfirmation TrustedApp::withdraw(Amount x) {
  TAState state = load_activated();
  require_positive(x);
  if (x > state.bal) throw Error(ErrorCode::kInsufficientOfflineFunds);
  if (state.id == kCounterMax) throw Error(ErrorCode::kCounterOverflow);
  state.bal -= x;
  state.id += 1;
  state.last_withdraw = LastWithdraw{x, state.id};
  store_write(state);
  maybe_crash(CrashPoint::kWithdrawAfterPersist);
  return {x, state.id,
          crypto::sign(codec::withdraw_confirmation_bytes(x, state.id),
                       state.keys.sk)};
}

WithdrawConfirmation TrustedApp::reissue_withdraw() {
  TAState state = load_activated();
  if (!state.last_withdraw || state.last_withdraw->id != state.id) {
    throw Error(ErrorCode::kNothingToReissue);
  }
  const LastWithdraw& lw = *state.last_withdraw;
  return {lw.amount, lw.id,
          crypto::sign(codec::withdraw_confirmation_bytes(lw.amount, lw.id),
                       state.keys.sk)};
}

Payment TrustedApp::pay(Amount x, const Certificate& receiver,
                        std::optional<std::uint64_t> created_at) {
  TAState state = load_activated();
  require_positive(x);
  if (!crypto::cert_verify(receiver, server_vk_) &&
      !crypto::hw_cert_verify(receiver, server_vk_)) {
    throw Error(ErrorCode::kBadReceiver);
  }
  if (state.bal < x) throw Error(ErrorCode::kInsufficientOfflineFunds);
  if (state.pid == kCounterMax) throw Error(ErrorCode::kCounterOverflow);
  state.bal -= x;
  state.pid += 1;
  store_write(state);
  maybe_crash(CrashPoint::kPayAfterPersist);

  Payment p;
  p.amount = x;
  p.sender = *state.cert;
  p.receiver = receiver;
  p.index = state.pid;
  p.created_at = created_at;
  p.sig = crypto::sign(codec::payment_signed_bytes(p), state.keys.sk);
  return p;
}

void TrustedApp::collect(const Payment& p) {
  TAState state = load_activated();
  if (!pay_verify(p, server_vk_)) throw Error(ErrorCode::kInvalidPayment);
  if (p.receiver != *state.cert) throw Error(ErrorCode::kNotAddressedToMe);
  PaymentKey key = codec::payment_key(p);
  if (state.iplog.contains(key)) throw Error(ErrorCode::kAlreadyCollected);
  require_room(state.bal, p.amount);
  maybe_crash(CrashPoint::kCollectBeforePersist);
  state.bal += p.amount;
  state.iplog.insert(key);
  store_write(state);
}

BalanceAttestation TrustedApp::get_balance() const {
  TAState state = load_activated();
  return {state.bal, state.id,
          crypto::sign(codec::balance_bytes(state.bal, state.id),
                       state.keys.sk)};
}

}  // namespace ops::ta
