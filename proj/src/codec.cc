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

#include "ops/codec.h"

#include <array>
#include <istream>
#include <ostream>

#include "ops/error.h"

namespace ops {

bool Payment::operator==(const Payment& other) const {
  return codec::payment_signed_bytes(*this) ==
         codec::payment_signed_bytes(other);
}

namespace {

constexpr std::array<std::string_view, 14> kMsgKindNames = {
    "ClientRegister",  "ClientRegisterAck", "TaRegister",
    "TaRegisterAck",   "DepositReq",        "DepositConfirmed",
    "WithdrawReq",     "WithdrawConfirmed", "PayReq",
    "PaymentTransfer", "PayConfirmed",      "ClaimReq",
    "ClaimConfirmed",  "Rejected",
};

}  // namespace

std::string_view msg_kind_name(MsgKind kind) {
  auto i = static_cast<std::size_t>(kind);
  if (i == 0 || i > kMsgKindNames.size()) return "Unknown";
  return kMsgKindNames[i - 1];
}

std::optional<MsgKind> parse_msg_kind(std::string_view name) {
  for (std::size_t i = 0; i < kMsgKindNames.size(); ++i) {
    if (kMsgKindNames[i] == name) return static_cast<MsgKind>(i + 1);
  }
  return std::nullopt;
}

namespace codec {
namespace {

const crypto::SecurityConfig& config() {
  return crypto::SecurityConfig::standard();
}

Writer tagged(crypto::SignedKind kind) {
  Writer w;
  w.str(config().domain_tag(kind));
  return w;
}

void require_amount(Amount amount) {
  if (amount == 0) throw Error(ErrorCode::kUnencodable, "amount must be >= 1");
}

void write_vk(Writer& w, const crypto::VerificationKey& vk) { w.fixed(vk.bytes); }
void write_sig(Writer& w, const crypto::Signature& sig) { w.fixed(sig.bytes); }

void write_body(Writer& w, const MessageBody& body) {
  std::visit(
      [&w](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ClientRegister>) {
          write_vk(w, m.ua_vk);
        } else if constexpr (std::is_same_v<T, ClientRegisterAck> ||
                             std::is_same_v<T, TaRegisterAck>) {
          write_certificate(w, m.cert);
        } else if constexpr (std::is_same_v<T, TaRegister>) {
          write_vk(w, m.device_vk);
          w.str(m.model);
          write_sig(w, m.device_cert);
          write_vk(w, m.ta_vk);
          write_vk(w, m.ua_vk);
          write_sig(w, m.attestation);
        } else if constexpr (std::is_same_v<T, DepositReq>) {
          require_amount(m.amount);
          w.u64(m.amount);
        } else if constexpr (std::is_same_v<T, DepositConfirmed> ||
                             std::is_same_v<T, WithdrawReq>) {
          require_amount(m.amount);
          w.u64(m.amount).u64(m.id);
          write_sig(w, m.sig);
        } else if constexpr (std::is_same_v<T, PayReq>) {
          require_amount(m.amount);
          w.u64(m.amount);
          write_certificate(w, m.receiver);
        } else if constexpr (std::is_same_v<T, PaymentTransfer> ||
                             std::is_same_v<T, ClaimReq>) {
          write_payment(w, m.payment);
        } else if constexpr (std::is_same_v<T, Rejected>) {
          if (!is_known_error_code(static_cast<std::uint8_t>(m.code))) {
            throw Error(ErrorCode::kUnencodable, "unknown error code");
          }
          w.u8(static_cast<std::uint8_t>(m.code));
          w.str(m.reason);
        }
        // WithdrawConfirmed, PayConfirmed, ClaimConfirmed have empty bodies.
      },
      body);
}

MessageBody read_body(Reader& r, MsgKind kind) {
  switch (kind) {
    case MsgKind::kClientRegister:
      return ClientRegister{read_vk(r)};
    case MsgKind::kClientRegisterAck:
      return ClientRegisterAck{read_certificate(r)};
    case MsgKind::kTaRegister: {
      TaRegister m;
      m.device_vk = read_vk(r);
      m.model = r.str();
      m.device_cert = read_sig(r);
      m.ta_vk = read_vk(r);
      m.ua_vk = read_vk(r);
      m.attestation = read_sig(r);
      return m;
    }
    case MsgKind::kTaRegisterAck:
      return TaRegisterAck{read_certificate(r)};
    case MsgKind::kDepositReq:
      return DepositReq{read_amount(r)};
    case MsgKind::kDepositConfirmed: {
      DepositConfirmed m;
      m.amount = read_amount(r);
      m.id = r.u64();
      m.sig = read_sig(r);
      return m;
    }
    case MsgKind::kWithdrawReq: {
      WithdrawReq m;
      m.amount = read_amount(r);
      m.id = r.u64();
      m.sig = read_sig(r);
      return m;
    }
    case MsgKind::kWithdrawConfirmed:
      return WithdrawConfirmed{};
    case MsgKind::kPayReq: {
      PayReq m;
      m.amount = read_amount(r);
      m.receiver = read_certificate(r);
      return m;
    }
    case MsgKind::kPaymentTransfer:
      return PaymentTransfer{read_payment(r)};
    case MsgKind::kPayConfirmed:
      return PayConfirmed{};
    case MsgKind::kClaimReq:
      return ClaimReq{read_payment(r)};
    case MsgKind::kClaimConfirmed:
      return ClaimConfirmed{};
    case MsgKind::kRejected: {
      std::uint8_t code = r.u8();
      if (!is_known_error_code(code)) {
        throw Error(ErrorCode::kMalformed, "unknown error code");
      }
      Rejected m;
      m.code = static_cast<ErrorCode>(code);
      m.reason = r.str();
      return m;
    }
  }
  throw Error(ErrorCode::kMalformed, "unknown message kind");
}

}  // namespace

crypto::VerificationKey read_vk(Reader& r) {
  return {r.fixed<crypto::kVerificationKeySize>()};
}

crypto::Signature read_sig(Reader& r) {
  return {r.fixed<crypto::kSignatureSize>()};
}

Amount read_amount(Reader& r) {
  Amount a = r.u64();
  if (a == 0) throw Error(ErrorCode::kMalformed, "zero amount");
  return a;
}

void write_certificate(Writer& w, const Certificate& cert) {
  if (cert.kind != CertKind::kUa && cert.kind != CertKind::kTa) {
    throw Error(ErrorCode::kUnencodable, "certificate kind");
  }
  w.u8(static_cast<std::uint8_t>(cert.kind));
  write_vk(w, cert.vk);
  write_sig(w, cert.sig);
}

Certificate read_certificate(Reader& r) {
  std::uint8_t kind = r.u8();
  if (kind != 1 && kind != 2) {
    throw Error(ErrorCode::kMalformed, "certificate kind");
  }
  Certificate cert;
  cert.kind = static_cast<CertKind>(kind);
  cert.vk = read_vk(r);
  cert.sig = read_sig(r);
  return cert;
}

void write_payment(Writer& w, const Payment& p) {
  require_amount(p.amount);
  if (p.sender.kind != CertKind::kTa) {
    throw Error(ErrorCode::kUnencodable, "sender must be a TA certificate");
  }
  w.u64(p.amount);
  write_certificate(w, p.sender);
  write_certificate(w, p.receiver);
  w.u64(p.index);
  write_sig(w, p.sig);
  w.u8(p.created_at ? 1 : 0);
  if (p.created_at) w.u64(*p.created_at);
}

Payment read_payment(Reader& r) {
  Payment p;
  p.amount = read_amount(r);
  p.sender = read_certificate(r);
  if (p.sender.kind != CertKind::kTa) {
    throw Error(ErrorCode::kMalformed, "sender must be a TA certificate");
  }
  p.receiver = read_certificate(r);
  p.index = r.u64();
  p.sig = read_sig(r);
  if (r.flag()) p.created_at = r.u64();
  return p;
}

void write_payment_key(Writer& w, const PaymentKey& key) {
  write_vk(w, key.sender_vk);
  w.u64(key.index);
}

PaymentKey read_payment_key(Reader& r) {
  PaymentKey key;
  key.sender_vk = read_vk(r);
  key.index = r.u64();
  return key;
}

Bytes encode(const Certificate& cert) {
  Writer w;
  write_certificate(w, cert);
  return std::move(w).take();
}

Bytes encode(const Payment& p) {
  Writer w;
  write_payment(w, p);
  return std::move(w).take();
}

Bytes encode(const PaymentKey& key) {
  Writer w;
  write_payment_key(w, key);
  return std::move(w).take();
}

Bytes encode_body(const MessageBody& body) {
  Writer w;
  write_body(w, body);
  return std::move(w).take();
}

Bytes encode(const WireMessage& msg) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(msg.kind()));
  write_body(w, msg.body);
  w.u8(msg.auth ? 1 : 0);
  if (msg.auth) {
    write_vk(w, msg.auth->sender_vk);
    w.u64(msg.auth->nonce);
    write_sig(w, msg.auth->sig);
  }
  return std::move(w).take();
}

Certificate decode_certificate(ByteView bytes) {
  Reader r(bytes);
  Certificate cert = read_certificate(r);
  r.expect_done();
  return cert;
}

Payment decode_payment(ByteView bytes) {
  Reader r(bytes);
  Payment p = read_payment(r);
  r.expect_done();
  return p;
}

PaymentKey decode_payment_key(ByteView bytes) {
  Reader r(bytes);
  PaymentKey key = read_payment_key(r);
  r.expect_done();
  return key;
}

WireMessage decode_message(ByteView bytes, std::optional<MsgKind> expected) {
  Reader r(bytes);
  std::uint8_t tag = r.u8();
  if (tag == 0 || tag > static_cast<std::uint8_t>(MsgKind::kRejected)) {
    throw Error(ErrorCode::kMalformed, "unknown message kind");
  }
  auto kind = static_cast<MsgKind>(tag);
  if (expected && *expected != kind) throw Error(ErrorCode::kWrongKind);
  WireMessage msg{read_body(r, kind), std::nullopt};
  if (r.flag()) {
    AuthEnvelope auth;
    auth.sender_vk = read_vk(r);
    auth.nonce = r.u64();
    auth.sig = read_sig(r);
    msg.auth = auth;
  }
  r.expect_done();
  return msg;
}

Bytes ua_certificate_bytes(const crypto::VerificationKey& vk) {
  Writer w = tagged(crypto::SignedKind::kUaCertificate);
  write_vk(w, vk);
  return std::move(w).take();
}

Bytes ta_certificate_bytes(const crypto::VerificationKey& vk) {
  Writer w = tagged(crypto::SignedKind::kTaCertificate);
  write_vk(w, vk);
  w.str(kTaTag);
  return std::move(w).take();
}

Bytes device_attestation_bytes(const crypto::VerificationKey& ta_vk,
                               std::string_view model) {
  Writer w = tagged(crypto::SignedKind::kDeviceAttestation);
  write_vk(w, ta_vk);
  std::string statement(kSecureDeviceTag);
  statement.append(model);
  w.str(statement);
  return std::move(w).take();
}

Bytes oem_device_bytes(const crypto::VerificationKey& device_vk,
                       std::string_view model) {
  Writer w = tagged(crypto::SignedKind::kOemDeviceCertificate);
  write_vk(w, device_vk);
  w.str(model);
  return std::move(w).take();
}

Bytes deposit_confirmation_bytes(const crypto::VerificationKey& ta_vk,
                                 Amount amount, std::uint64_t id) {
  Writer w = tagged(crypto::SignedKind::kDepositConfirmation);
  write_vk(w, ta_vk);
  w.u64(amount).u64(id);
  return std::move(w).take();
}

Bytes withdraw_confirmation_bytes(Amount amount, std::uint64_t id) {
  Writer w = tagged(crypto::SignedKind::kWithdrawConfirmation);
  w.u64(amount).u64(id);
  return std::move(w).take();
}

Bytes balance_bytes(Amount balance, std::uint64_t id) {
  Writer w = tagged(crypto::SignedKind::kBalanceAttestation);
  w.u64(balance).u64(id);
  return std::move(w).take();
}

Bytes payment_signed_bytes(const Payment& p) {
  Writer w = tagged(crypto::SignedKind::kPayment);
  w.u64(p.amount);
  write_certificate(w, p.sender);
  write_certificate(w, p.receiver);
  w.u64(p.index);
  return std::move(w).take();
}

Bytes request_auth_bytes(MsgKind kind, ByteView body, std::uint64_t nonce) {
  Writer w = tagged(crypto::SignedKind::kRequestAuth);
  w.u8(static_cast<std::uint8_t>(kind));
  w.bytes(body);
  w.u64(nonce);
  return std::move(w).take();
}

PaymentKey payment_key(const Payment& p) { return {p.sender.vk, p.index}; }

Bytes frame(ByteView message) {
  Writer w;
  w.bytes(message);
  return std::move(w).take();
}

void write_frame(std::ostream& out, ByteView message) {
  Bytes f = frame(message);
  out.write(reinterpret_cast<const char*>(f.data()),
            static_cast<std::streamsize>(f.size()));
}

std::optional<Bytes> read_frame(std::istream& in) {
  std::array<char, 4> len_buf{};
  in.read(len_buf.data(), 4);
  if (in.gcount() == 0) return std::nullopt;
  if (in.gcount() != 4) throw Error(ErrorCode::kMalformed, "short frame header");
  std::uint32_t len = 0;
  for (char c : len_buf) len = (len << 8) | static_cast<std::uint8_t>(c);
  Bytes out(len);
  in.read(reinterpret_cast<char*>(out.data()), len);
  if (static_cast<std::uint32_t>(in.gcount()) != len) {
    throw Error(ErrorCode::kMalformed, "short frame body");
  }
  return out;
}

}  // namespace codec
}  // namespace ops
