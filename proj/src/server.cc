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

#include "ops/server.h"

#include <fstream>
#include <iterator>
#include <limits>

#include "ops/certs.h"
#include "ops/codec.h"
#include "ops/device.h"
#include "ops/error.h"
#include "ops/wire_format.h"

namespace ops::server {
namespace {

constexpr std::string_view kSnapshotMagic = "OPSS";
constexpr std::uint8_t kSnapshotVersion = 1;

bool verify_envelope(const WireMessage& req) {
  if (!req.auth) return false;
  Bytes body = codec::encode_body(req.body);
  return crypto::sig_verify(
      codec::request_auth_bytes(req.kind(), body, req.auth->nonce),
      req.auth->sig, req.auth->sender_vk);
}

template <typename T>
const T& body_as(const WireMessage& req) {
  const T* body = std::get_if<T>(&req.body);
  if (body == nullptr) throw Error(ErrorCode::kWrongKind);
  return *body;
}

Bytes encode_response(MessageBody body) {
  return codec::encode(WireMessage{std::move(body), std::nullopt});
}

}  // namespace

bool ServerState::operator==(const ServerState& o) const {
  return keys.vk == o.keys.vk && keys.sk == o.keys.sk &&
         accounts == o.accounts && ta_owner == o.ta_owner && plog == o.plog &&
         oem_roots == o.oem_roots && minted_total == o.minted_total;
}

WireMessage make_authed(MessageBody body, const crypto::KeyPair& ua_keys,
                        std::uint64_t nonce) {
  WireMessage msg{std::move(body), std::nullopt};
  Bytes encoded = codec::encode_body(msg.body);
  AuthEnvelope auth;
  auth.sender_vk = ua_keys.vk;
  auth.nonce = nonce;
  auth.sig = crypto::sign(codec::request_auth_bytes(msg.kind(), encoded, nonce),
                          ua_keys.sk);
  msg.auth = auth;
  return msg;
}

Server::Server(crypto::KeyPair keys) { state_.keys = std::move(keys); }

Server Server::create(std::mt19937_64& rng) {
  return Server(crypto::keygen(crypto::SecurityConfig::standard(), rng));
}

void Server::add_oem_root(const crypto::VerificationKey& root) {
  state_.oem_roots.insert(root);
}

const Account* Server::account(const crypto::VerificationKey& ua_vk) const {
  auto it = state_.accounts.find(ua_vk);
  return it == state_.accounts.end() ? nullptr : &it->second;
}

std::optional<crypto::VerificationKey> Server::owner_of_ta(
    const crypto::VerificationKey& ta_vk) const {
  auto it = state_.ta_owner.find(ta_vk);
  if (it == state_.ta_owner.end()) return std::nullopt;
  return it->second;
}

Account* Server::authenticate(const WireMessage& req) {
  if (!verify_envelope(req)) throw Error(ErrorCode::kUnauthenticated);
  auto it = state_.accounts.find(req.auth->sender_vk);
  if (it == state_.accounts.end()) return nullptr;
  Account& account = it->second;
  if (req.auth->nonce <= account.last_nonce) {
    throw Error(ErrorCode::kReplayedRequest);
  }
  account.last_nonce = req.auth->nonce;
  return &account;
}

Account& Server::require_account(const WireMessage& req) {
  Account* account = authenticate(req);
  if (account == nullptr) throw Error(ErrorCode::kUnauthenticated, "unknown sender");
  return *account;
}

Certificate Server::register_client(const WireMessage& req) {
  const auto& body = body_as<ClientRegister>(req);
  if (!verify_envelope(req) || req.auth->sender_vk != body.ua_vk) {
    throw Error(ErrorCode::kUnauthenticated);
  }
  if (state_.accounts.contains(body.ua_vk)) {
    throw Error(ErrorCode::kAlreadyRegistered);
  }
  Account account;
  account.last_nonce = req.auth->nonce;
  state_.accounts.emplace(body.ua_vk, std::move(account));
  return crypto::issue_ua_certificate(body.ua_vk, state_.keys.sk);
}

Certificate Server::register_ta(const WireMessage& req) {
  const auto& body = body_as<TaRegister>(req);
  if (!req.auth || req.auth->sender_vk != body.ua_vk) {
    throw Error(ErrorCode::kUnauthenticated);
  }
  Account* account = authenticate(req);
  if (account == nullptr || account->ta_vk) {
    throw Error(ErrorCode::kUnknownOrProvisioned);
  }
  bool device_trusted = false;
  for (const auto& root : state_.oem_roots) {
    if (wallet::device_cert_verify(body.device_vk, body.model, body.device_cert,
                                   root)) {
      device_trusted = true;
      break;
    }
  }
  if (!device_trusted) {
    throw Error(ErrorCode::kAttestationRejected, "device not from a trusted OEM");
  }
  if (!crypto::oem_cert_verify(body.ta_vk, body.attestation, body.device_vk,
                               body.model)) {
    throw Error(ErrorCode::kAttestationRejected);
  }
  if (state_.ta_owner.contains(body.ta_vk)) {
    throw Error(ErrorCode::kAttestationRejected, "TA key already registered");
  }
  account->idctr = 0;
  account->ta_vk = body.ta_vk;
  state_.ta_owner.emplace(body.ta_vk, body.ua_vk);
  return crypto::issue_ta_certificate(body.ta_vk, state_.keys.sk);
}

DepositConfirmed Server::handle_deposit(const WireMessage& req) {
  const auto& body = body_as<DepositReq>(req);
  Account& account = require_account(req);
  if (!account.ta_vk) throw Error(ErrorCode::kNoTaRegistered);
  if (body.amount == 0) throw Error(ErrorCode::kInvalidAmount);
  if (body.amount > account.onbal) {
    throw Error(ErrorCode::kInsufficientOnlineFunds);
  }
  if (account.idctr == std::numeric_limits<std::uint64_t>::max()) {
    throw Error(ErrorCode::kCounterOverflow);
  }
  account.onbal -= body.amount;
  account.idctr += 1;
  DepositConfirmed out;
  out.amount = body.amount;
  out.id = account.idctr;
  out.sig = crypto::sign(
      codec::deposit_confirmation_bytes(*account.ta_vk, body.amount, out.id),
      state_.keys.sk);
  return out;
}

WithdrawConfirmed Server::handle_withdraw(const WireMessage& req) {
  const auto& body = body_as<WithdrawReq>(req);
  Account& account = require_account(req);
  if (!account.ta_vk) throw Error(ErrorCode::kNoTaRegistered);
  if (account.idctr == std::numeric_limits<std::uint64_t>::max() ||
      body.id != account.idctr + 1) {
    throw Error(ErrorCode::kCounterOutOfSync);
  }
  if (!crypto::sig_verify(
          codec::withdraw_confirmation_bytes(body.amount, body.id), body.sig,
          *account.ta_vk)) {
    throw Error(ErrorCode::kInvalidConfirmation);
  }
  if (account.onbal > std::numeric_limits<Amount>::max() - body.amount) {
    throw Error(ErrorCode::kInvalidAmount, "balance overflow");
  }
  account.onbal += body.amount;
  account.idctr += 1;
  return {};
}

ClaimConfirmed Server::handle_claim(const WireMessage& req) {
  const Payment& p = body_as<ClaimReq>(req).payment;
  require_account(req);
  if (p.receiver.kind != CertKind::kUa) throw Error(ErrorCode::kMustBeCollected);
  if (!pay_verify(p, state_.keys.vk)) throw Error(ErrorCode::kInvalidPayment);
  PaymentKey key = codec::payment_key(p);
  if (state_.plog.contains(key)) throw Error(ErrorCode::kAlreadyClaimed);
  auto it = state_.accounts.find(p.receiver.vk);
  if (it == state_.accounts.end()) throw Error(ErrorCode::kUnknownReceiver);
  if (it->second.onbal > std::numeric_limits<Amount>::max() - p.amount) {
    throw Error(ErrorCode::kInvalidAmount, "balance overflow");
  }
  it->second.onbal += p.amount;
  state_.plog.insert(key);
  return {};
}

void Server::mint(const crypto::VerificationKey& ua_vk, Amount x) {
  auto it = state_.accounts.find(ua_vk);
  if (it == state_.accounts.end()) throw Error(ErrorCode::kUnknownAccount);
  if (x == 0) throw Error(ErrorCode::kInvalidAmount);
  it->second.onbal += x;
  state_.minted_total += x;
}

Bytes Server::dispatch(const WireMessage& req) {
  switch (req.kind()) {
    case MsgKind::kClientRegister:
      return encode_response(ClientRegisterAck{register_client(req)});
    case MsgKind::kTaRegister:
      return encode_response(TaRegisterAck{register_ta(req)});
    case MsgKind::kDepositReq:
      return encode_response(handle_deposit(req));
    case MsgKind::kWithdrawReq:
      return encode_response(handle_withdraw(req));
    case MsgKind::kClaimReq:
      return encode_response(handle_claim(req));
    default:
      throw Error(ErrorCode::kUnexpectedMessage);
  }
}

Bytes Server::handle_frame(ByteView request) {
  WireMessage req;
  try {
    req = codec::decode_message(request);
  } catch (const Error& e) {
    return encode_response(Rejected{e.code(), e.what()});
  }

  Account* known = nullptr;
  if (req.auth) {
    auto it = state_.accounts.find(req.auth->sender_vk);
    if (it != state_.accounts.end()) known = &it->second;
  }
  if (known != nullptr && req.auth->nonce == known->last_nonce &&
      !known->last_response.empty() &&
      std::equal(request.begin(), request.end(), known->last_request.begin(),
                 known->last_request.end())) {
    return known->last_response;
  }

  const std::uint64_t nonce_before = known ? known->last_nonce : 0;
  Bytes response;
  try {
    response = dispatch(req);
  } catch (const Error& e) {
    response = encode_response(Rejected{e.code(), e.what()});
  }

  // Cache only when this request advanced the sender's nonce, i.e. it passed
  // authentication.
  if (req.auth) {
    auto it = state_.accounts.find(req.auth->sender_vk);
    if (it != state_.accounts.end() && it->second.last_nonce == req.auth->nonce &&
        (known == nullptr || nonce_before != req.auth->nonce)) {
      it->second.last_request.assign(request.begin(), request.end());
      it->second.last_response = response;
    }
  }
  return response;
}

Bytes Server::snapshot() const {
  Writer w;
  w.raw(as_bytes(kSnapshotMagic));
  w.u8(kSnapshotVersion);
  w.bytes(state_.keys.sk.seed());
  w.u32(static_cast<std::uint32_t>(state_.accounts.size()));
  for (const auto& [vk, account] : state_.accounts) {
    w.fixed(vk.bytes);
    w.u8(account.ta_vk ? 1 : 0);
    if (account.ta_vk) w.fixed(account.ta_vk->bytes);
    w.u64(account.onbal).u64(account.idctr).u64(account.last_nonce);
    w.bytes(account.last_request);
    w.bytes(account.last_response);
  }
  w.u32(static_cast<std::uint32_t>(state_.plog.size()));
  for (const PaymentKey& key : state_.plog) codec::write_payment_key(w, key);
  w.u32(static_cast<std::uint32_t>(state_.oem_roots.size()));
  for (const auto& root : state_.oem_roots) w.fixed(root.bytes);
  w.u64(state_.minted_total);
  crypto::Digest digest = crypto::hash(w.data());
  w.raw(ByteView(digest.data(), digest.size()));
  return std::move(w).take();
}

Server Server::from_snapshot(ByteView bytes) {
  if (bytes.size() < kSnapshotMagic.size() + 1 + crypto::kDigestSize) {
    throw Error(ErrorCode::kCorruptState, "snapshot too short");
  }
  ByteView content = bytes.first(bytes.size() - crypto::kDigestSize);
  ByteView stored = bytes.last(crypto::kDigestSize);
  crypto::Digest digest = crypto::hash(content);
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
    Server server;
    Bytes seed = r.bytes();
    server.state_.keys.sk = crypto::SigningKey::from_seed(seed);
    server.state_.keys.vk = server.state_.keys.sk.verification_key();
    std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      crypto::VerificationKey vk = codec::read_vk(r);
      Account account;
      if (r.flag()) {
        account.ta_vk = codec::read_vk(r);
        server.state_.ta_owner.emplace(*account.ta_vk, vk);
      }
      account.onbal = r.u64();
      account.idctr = r.u64();
      account.last_nonce = r.u64();
      account.last_request = r.bytes();
      account.last_response = r.bytes();
      server.state_.accounts.emplace(vk, std::move(account));
    }
    n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      server.state_.plog.insert(codec::read_payment_key(r));
    }
    n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      server.state_.oem_roots.insert(codec::read_vk(r));
    }
    server.state_.minted_total = r.u64();
    r.expect_done();
    return server;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptState) throw;
    throw Error(ErrorCode::kCorruptState, e.what());
  }
}

void Server::persist(const std::filesystem::path& path) const {
  Bytes bytes = snapshot();
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kCorruptState, "write failed");
  }
  std::filesystem::rename(tmp, path);
}

Server Server::restore(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kCorruptState, "cannot open snapshot");
  Bytes bytes((std::istreambuf_iterator<char>(in)),
              std::istreambuf_iterator<char>());
  return from_snapshot(bytes);
}

}  // namespace ops::server
