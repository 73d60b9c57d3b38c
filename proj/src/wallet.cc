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

#include "ops/wallet.h"

#include <algorithm>

#include "ops/codec.h"
#include "ops/error.h"
#include "ops/server.h"
#include "ops/wire_format.h"

namespace ops::wallet {
namespace {

constexpr std::string_view kSnapshotMagic = "OPSW";
constexpr std::uint8_t kSnapshotVersion = 1;

void write_payments(Writer& w, const std::vector<Payment>& list) {
  w.u32(static_cast<std::uint32_t>(list.size()));
  for (const Payment& p : list) codec::write_payment(w, p);
}

std::vector<Payment> read_payments(Reader& r) {
  std::uint32_t n = r.u32();
  std::vector<Payment> out;
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(codec::read_payment(r));
  return out;
}

void write_optional_cert(Writer& w, const std::optional<Certificate>& cert) {
  w.u8(cert ? 1 : 0);
  if (cert) codec::write_certificate(w, *cert);
}

std::optional<Certificate> read_optional_cert(Reader& r) {
  if (!r.flag()) return std::nullopt;
  return codec::read_certificate(r);
}

}  // namespace

Wallet::Wallet(crypto::KeyPair keys, crypto::VerificationKey server_vk)
    : server_vk_(server_vk) {
  state_.keys = std::move(keys);
}

Wallet Wallet::create(std::mt19937_64& rng, crypto::VerificationKey server_vk) {
  return Wallet(crypto::keygen(crypto::SecurityConfig::standard(), rng),
                server_vk);
}

Bytes Wallet::sign_request(MessageBody body) {
  state_.nonce += 1;
  return codec::encode(
      server::make_authed(std::move(body), state_.keys, state_.nonce));
}

WireMessage Wallet::exchange(ServerLink& link, ByteView frame) {
  std::optional<Bytes> response = link.call(frame);
  if (!response) throw Error(ErrorCode::kNoResponse);
  return codec::decode_message(*response);
}

void Wallet::setup_client(ServerLink& link) {
  Bytes frame = sign_request(ClientRegister{state_.keys.vk});
  WireMessage resp = exchange(link, frame);
  if (const auto* rej = std::get_if<Rejected>(&resp.body)) {
    throw Error(rej->code);
  }
  const auto* ack = std::get_if<ClientRegisterAck>(&resp.body);
  if (ack == nullptr) throw Error(ErrorCode::kUnexpectedMessage);
  if (ack->cert.vk != state_.keys.vk ||
      !crypto::cert_verify(ack->cert, server_vk_)) {
    throw Error(ErrorCode::kBadServerCert);
  }
  state_.cert = ack->cert;
}

void Wallet::setup_ta(ServerLink& link, const DeviceIdentity& device,
                      std::mt19937_64& rng) {
  if (!ta_) ta_.emplace(server_vk_, ta::SecureStore::create(rng));
  ta::InitResult init = ta_->init(device, rng);

  TaRegister req;
  req.device_vk = device.device_keys.vk;
  req.model = device.model;
  req.device_cert = device.oem_cert;
  req.ta_vk = init.vk;
  req.ua_vk = state_.keys.vk;
  req.attestation = init.attestation;
  WireMessage resp = exchange(link, sign_request(req));
  if (const auto* rej = std::get_if<Rejected>(&resp.body)) {
    throw Error(rej->code);
  }
  const auto* ack = std::get_if<TaRegisterAck>(&resp.body);
  if (ack == nullptr) throw Error(ErrorCode::kUnexpectedMessage);
  try {
    ta_->cert_init(ack->cert);
  } catch (const Error& e) {
    throw Error(ErrorCode::kActivationFailed, e.what());
  }
  state_.ta_cert = ack->cert;
}

void Wallet::archive_payment(const PaymentKey& key) {
  auto it = std::find_if(state_.inbox.begin(), state_.inbox.end(),
                         [&](const Payment& p) { return codec::payment_key(p) == key; });
  if (it == state_.inbox.end()) return;
  state_.archive.push_back(*it);
  state_.inbox.erase(it);
}

void Wallet::send_pending(ServerLink& link) {
  WireMessage resp = exchange(link, state_.pending->frame);
  const auto* rej = std::get_if<Rejected>(&resp.body);
  if (rej != nullptr && rej->code == ErrorCode::kReplayedRequest &&
      state_.pending->op != PendingOp::kDeposit) {
    // A later request overtook this one. Withdraws and claims are gated by
    // the counter and plog, so the same body under a fresh nonce is safe.
    MessageBody body = codec::decode_message(state_.pending->frame).body;
    state_.pending->frame = sign_request(std::move(body));
    resp = exchange(link, state_.pending->frame);
  }
  complete(resp);
}

void Wallet::complete(const WireMessage& resp) {
  const PendingRequest pending = *state_.pending;

  if (const auto* rej = std::get_if<Rejected>(&resp.body)) {
    if (pending.op == PendingOp::kClaim && rej->code == ErrorCode::kAlreadyClaimed) {
      WireMessage req = codec::decode_message(pending.frame, MsgKind::kClaimReq);
      archive_payment(codec::payment_key(std::get<ClaimReq>(req.body).payment));
      state_.pending.reset();
      return;
    }
    state_.pending.reset();
    throw Error(rej->code);
  }

  switch (pending.op) {
    case PendingOp::kDeposit: {
      const auto* conf = std::get_if<DepositConfirmed>(&resp.body);
      if (conf == nullptr) break;
      try {
        ta_->deposit(conf->amount, conf->id, conf->sig);
      } catch (const Error& e) {
        // A counter already past this id means the TA applied it earlier.
        // Anything else keeps the request pending: a retry returns the
        // server's cached confirmation, so a mangled copy is not fatal.
        if (e.code() == ErrorCode::kCounterOutOfSync &&
            ta_->store_read().id >= conf->id) {
          state_.pending.reset();
          return;
        }
        throw;
      }
      state_.pending.reset();
      return;
    }
    case PendingOp::kWithdraw:
      if (!std::holds_alternative<WithdrawConfirmed>(resp.body)) break;
      state_.pending.reset();
      return;
    case PendingOp::kClaim: {
      if (!std::holds_alternative<ClaimConfirmed>(resp.body)) break;
      WireMessage req = codec::decode_message(pending.frame, MsgKind::kClaimReq);
      archive_payment(codec::payment_key(std::get<ClaimReq>(req.body).payment));
      state_.pending.reset();
      return;
    }
  }
  state_.pending.reset();
  throw Error(ErrorCode::kUnexpectedMessage);
}

void Wallet::resume(ServerLink& link) {
  if (state_.withdraw_needs_reissue) {
    ta::WithdrawConfirmation conf = ta_->reissue_withdraw();
    state_.withdraw_needs_reissue = false;
    state_.pending = PendingRequest{
        PendingOp::kWithdraw,
        sign_request(WithdrawReq{conf.amount, conf.id, conf.sig})};
  }
  if (state_.pending) send_pending(link);
}

void Wallet::do_deposit(ServerLink& link, Amount x) {
  if (!registered()) throw Error(ErrorCode::kNotRegistered);
  if (!activated()) throw Error(ErrorCode::kNoTa);
  if (x == 0) throw Error(ErrorCode::kInvalidAmount);
  resume(link);
  // The server debits on request; make sure the TA can take the credit.
  ta_->store_read();
  state_.pending =
      PendingRequest{PendingOp::kDeposit, sign_request(DepositReq{x})};
  send_pending(link);
}

void Wallet::send_withdraw(ServerLink& link,
                           const ta::WithdrawConfirmation& conf) {
  state_.pending = PendingRequest{
      PendingOp::kWithdraw,
      sign_request(WithdrawReq{conf.amount, conf.id, conf.sig})};
  if (crash_ == WalletCrash::kWithdrawBeforeSend) {
    crash_ = WalletCrash::kNone;
    throw Error(ErrorCode::kCrashed);
  }
  send_pending(link);
}

void Wallet::do_withdraw(ServerLink& link, Amount x) {
  if (!registered()) throw Error(ErrorCode::kNotRegistered);
  if (!activated()) throw Error(ErrorCode::kNoTa);
  if (x == 0) throw Error(ErrorCode::kInvalidAmount);
  resume(link);
  ta::WithdrawConfirmation conf;
  try {
    conf = ta_->withdraw(x);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCrashed) state_.withdraw_needs_reissue = true;
    throw;
  }
  send_withdraw(link, conf);
}

const Certificate& Wallet::presented_cert() const {
  if (state_.ta_cert) return *state_.ta_cert;
  if (state_.cert) return *state_.cert;
  throw Error(ErrorCode::kNotRegistered);
}

PayReq Wallet::request_payment(Amount x) const {
  if (x == 0) throw Error(ErrorCode::kInvalidAmount);
  return PayReq{x, presented_cert()};
}

Payment Wallet::make_payment(const PayReq& req,
                             std::optional<std::uint64_t> now) {
  if (!activated()) throw Error(ErrorCode::kNoTa);
  if (!crypto::cert_verify(req.receiver, server_vk_) &&
      !crypto::hw_cert_verify(req.receiver, server_vk_)) {
    throw Error(ErrorCode::kBadReceiver);
  }
  Payment p = ta_->pay(req.amount, req.receiver, now);
  state_.sent.push_back(p);
  return p;
}

Acceptance Wallet::accept_payment(const Payment& p, const PayReq& expected) {
  if (!pay_verify(p, server_vk_)) return {false, ErrorCode::kInvalidPayment};
  if (!registered() || p.receiver != expected.receiver ||
      expected.receiver != presented_cert()) {
    return {false, ErrorCode::kWrongReceiver};
  }
  if (p.amount != expected.amount) return {false, ErrorCode::kAmountMismatch};
  PaymentKey key = codec::payment_key(p);
  if (state_.iplog.contains(key)) return {false, ErrorCode::kReplayedPayment};

  state_.iplog.insert(key);
  state_.inbox.push_back(p);
  return {true, ErrorCode::kOk};
}

std::size_t Wallet::do_claim(ServerLink& link, const Payment& p) {
  resume(link);
  state_.pending =
      PendingRequest{PendingOp::kClaim, sign_request(ClaimReq{p})};
  send_pending(link);
  return 1;
}

std::size_t Wallet::do_claim(ServerLink& link) {
  resume(link);
  std::vector<Payment> claimable;
  for (const Payment& p : state_.inbox) {
    if (p.receiver.kind == CertKind::kUa) claimable.push_back(p);
  }
  std::size_t n = 0;
  for (const Payment& p : claimable) n += do_claim(link, p);
  return n;
}

std::size_t Wallet::collect_pending() {
  if (!ta_) return 0;
  std::vector<Payment> collectable;
  for (const Payment& p : state_.inbox) {
    if (p.receiver.kind == CertKind::kTa) collectable.push_back(p);
  }
  std::size_t n = 0;
  for (const Payment& p : collectable) {
    try {
      ta_->collect(p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAlreadyCollected) throw;
    }
    archive_payment(codec::payment_key(p));
    ++n;
  }
  return n;
}

Bytes Wallet::snapshot() const {
  Writer w;
  w.raw(as_bytes(kSnapshotMagic));
  w.u8(kSnapshotVersion);
  w.bytes(state_.keys.sk.seed());
  write_optional_cert(w, state_.cert);
  write_optional_cert(w, state_.ta_cert);
  w.u32(static_cast<std::uint32_t>(state_.iplog.size()));
  for (const PaymentKey& key : state_.iplog) codec::write_payment_key(w, key);
  write_payments(w, state_.inbox);
  write_payments(w, state_.archive);
  write_payments(w, state_.sent);
  w.u64(state_.nonce);
  w.u8(state_.pending ? 1 : 0);
  if (state_.pending) {
    w.u8(static_cast<std::uint8_t>(state_.pending->op));
    w.bytes(state_.pending->frame);
  }
  w.u8(state_.withdraw_needs_reissue ? 1 : 0);
  crypto::Digest digest = crypto::hash(w.data());
  w.raw(ByteView(digest.data(), digest.size()));
  return std::move(w).take();
}

Wallet Wallet::from_snapshot(ByteView bytes, crypto::VerificationKey server_vk) {
  if (bytes.size() < kSnapshotMagic.size() + 1 + crypto::kDigestSize) {
    throw Error(ErrorCode::kCorruptState, "snapshot too short");
  }
  ByteView content = bytes.first(bytes.size() - crypto::kDigestSize);
  crypto::Digest digest = crypto::hash(content);
  ByteView stored = bytes.last(crypto::kDigestSize);
  if (!std::equal(digest.begin(), digest.end(), stored.begin())) {
    throw Error(ErrorCode::kCorruptState, "checksum mismatch");
  }
  try {
    Reader r(content);
    ByteView magic = r.raw(kSnapshotMagic.size());
    if (!std::equal(magic.begin(), magic.end(), kSnapshotMagic.begin()) ||
        r.u8() != kSnapshotVersion) {
      throw Error(ErrorCode::kCorruptState, "bad header");
    }
    crypto::SigningKey sk = crypto::SigningKey::from_seed(r.bytes());
    Wallet wallet({sk.verification_key(), sk}, server_vk);
    WalletState& s = wallet.state_;
    s.cert = read_optional_cert(r);
    s.ta_cert = read_optional_cert(r);
    std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) s.iplog.insert(codec::read_payment_key(r));
    s.inbox = read_payments(r);
    s.archive = read_payments(r);
    s.sent = read_payments(r);
    s.nonce = r.u64();
    if (r.flag()) {
      std::uint8_t op = r.u8();
      if (op < 1 || op > 3) throw Error(ErrorCode::kMalformed, "pending op");
      s.pending = PendingRequest{static_cast<PendingOp>(op), r.bytes()};
    }
    s.withdraw_needs_reissue = r.flag();
    r.expect_done();
    return wallet;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptState) throw;
    throw Error(ErrorCode::kCorruptState, e.what());
  }
}

}  // namespace ops::wallet
