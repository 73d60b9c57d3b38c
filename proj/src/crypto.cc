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

#include "ops/crypto.h"

#include <sodium.h>

#include <stdexcept>

#include "ops/certs.h"
#include "ops/codec.h"
#include "ops/error.h"

namespace ops::crypto {

void init_library() {
  static const bool ready = [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
    return true;
  }();
  (void)ready;
}

namespace {

void ensure_sodium() { init_library(); }

}  // namespace

SigningKey SigningKey::from_seed(ByteView seed) {
  if (seed.size() != kSigningKeySize) {
    throw Error(ErrorCode::kBadKeyMaterial, "seed must be 32 bytes");
  }
  ensure_sodium();
  SigningKey key;
  std::array<std::uint8_t, kVerificationKeySize> pk{};
  crypto_sign_seed_keypair(pk.data(), key.expanded_.data(), seed.data());
  return key;
}

SigningKey SigningKey::from_expanded(ByteView expanded) {
  SigningKey key;
  if (expanded.size() != key.expanded_.size()) {
    throw Error(ErrorCode::kBadKeyMaterial, "expanded key must be 64 bytes");
  }
  std::copy(expanded.begin(), expanded.end(), key.expanded_.begin());
  return key;
}

VerificationKey SigningKey::verification_key() const {
  VerificationKey vk;
  std::copy(expanded_.begin() + kSigningKeySize, expanded_.end(),
            vk.bytes.begin());
  return vk;
}

std::string_view SecurityConfig::domain_tag(SignedKind kind) const {
  switch (kind) {
    case SignedKind::kUaCertificate: return "ops/v1/ua-cert";
    case SignedKind::kTaCertificate: return "ops/v1/ta-cert";
    case SignedKind::kDeviceAttestation: return "ops/v1/device-attestation";
    case SignedKind::kOemDeviceCertificate: return "ops/v1/oem-device-cert";
    case SignedKind::kDepositConfirmation: return "ops/v1/deposit-confirmation";
    case SignedKind::kWithdrawConfirmation: return "ops/v1/withdraw-confirmation";
    case SignedKind::kBalanceAttestation: return "ops/v1/balance";
    case SignedKind::kPayment: return "ops/v1/payment";
    case SignedKind::kRequestAuth: return "ops/v1/request";
  }
  return "ops/v1/unknown";
}

void SecurityConfig::validate() const {
  if (lambda < 128 || lambda > 256) {
    throw Error(ErrorCode::kBadKeyMaterial, "lambda must be in [128, 256]");
  }
}

const SecurityConfig& SecurityConfig::standard() {
  static const SecurityConfig config;
  return config;
}

KeyPair keygen(const SecurityConfig& config, std::mt19937_64& rng) {
  config.validate();
  std::array<std::uint8_t, kSigningKeySize> seed{};
  for (std::size_t word = 0; word < kSigningKeySize / 8; ++word) {
    std::uint64_t v = rng();
    for (int i = 0; i < 8; ++i) {
      seed[word * 8 + i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    }
  }
  SigningKey sk = SigningKey::from_seed(seed);
  return {sk.verification_key(), sk};
}

KeyPair keygen(const SecurityConfig& config) {
  config.validate();
  ensure_sodium();
  std::array<std::uint8_t, kSigningKeySize> seed{};
  randombytes_buf(seed.data(), seed.size());
  SigningKey sk = SigningKey::from_seed(seed);
  return {sk.verification_key(), sk};
}

Signature sign(ByteView msg, const SigningKey& sk) {
  ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, msg.data(), msg.size(),
                       sk.expanded().data());
  return sig;
}

Signature sign(ByteView msg, ByteView sk_seed) {
  return sign(msg, SigningKey::from_seed(sk_seed));
}

bool sig_verify(ByteView msg, ByteView sig, ByteView vk) {
  if (sig.size() != kSignatureSize || vk.size() != kVerificationKeySize) {
    return false;
  }
  ensure_sodium();
  return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(),
                                     vk.data()) == 0;
}

Digest hash(ByteView x) {
  ensure_sodium();
  Digest out{};
  crypto_hash_sha256(out.data(), x.data(), x.size());
  return out;
}

bool cert_verify(const Certificate& cert, const VerificationKey& server_vk) {
  if (cert.kind != CertKind::kUa) return false;
  return sig_verify(codec::ua_certificate_bytes(cert.vk), cert.sig, server_vk);
}

bool hw_cert_verify(const Certificate& cert, const VerificationKey& server_vk) {
  if (cert.kind != CertKind::kTa) return false;
  return sig_verify(codec::ta_certificate_bytes(cert.vk), cert.sig, server_vk);
}

bool oem_cert_verify(const VerificationKey& vk, const Signature& attestation,
                     const VerificationKey& device_vk, std::string_view model) {
  return sig_verify(codec::device_attestation_bytes(vk, model), attestation,
                    device_vk);
}

Certificate issue_ua_certificate(const VerificationKey& vk,
                                 const SigningKey& server_sk) {
  return {vk, CertKind::kUa, sign(codec::ua_certificate_bytes(vk), server_sk)};
}

Certificate issue_ta_certificate(const VerificationKey& vk,
                                 const SigningKey& server_sk) {
  return {vk, CertKind::kTa, sign(codec::ta_certificate_bytes(vk), server_sk)};
}

}  // namespace ops::crypto

namespace ops {

bool pay_verify(const Payment& p, const crypto::VerificationKey& server_vk) {
  if (!crypto::hw_cert_verify(p.sender, server_vk)) return false;
  return crypto::sig_verify(codec::payment_signed_bytes(p), p.sig, p.sender.vk);
}

}  // namespace ops
