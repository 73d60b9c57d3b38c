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

#ifndef OPS_CRYPTO_H_
#define OPS_CRYPTO_H_

#include <array>
#include <compare>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "ops/bytes.h"

namespace ops::crypto {

inline constexpr std::size_t kVerificationKeySize = 32;
inline constexpr std::size_t kSigningKeySize = 32;
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::size_t kDigestSize = 32;

struct VerificationKey {
  std::array<std::uint8_t, kVerificationKeySize> bytes{};

  ByteView view() const { return {bytes.data(), bytes.size()}; }
  std::string hex() const { return to_hex(view()); }
  auto operator<=>(const VerificationKey&) const = default;
};

// Holds the 32-byte seed from which both halves of an Ed25519 key pair are
// derived. The expanded form is cached so signing does not re-derive it.
class SigningKey {
 public:
  SigningKey() = default;

  // Throws Error(kBadKeyMaterial) unless seed is exactly kSigningKeySize.
  static SigningKey from_seed(ByteView seed);
  // Restores a key from expanded() without re-deriving the public half.
  // Only for sealed storage that already guarantees integrity; throws
  // Error(kBadKeyMaterial) on a wrong length.
  static SigningKey from_expanded(ByteView expanded);

  ByteView seed() const { return {expanded_.data(), kSigningKeySize}; }
  VerificationKey verification_key() const;
  const std::array<std::uint8_t, 64>& expanded() const { return expanded_; }

  bool operator==(const SigningKey& o) const { return expanded_ == o.expanded_; }

 private:
  std::array<std::uint8_t, 64> expanded_{};
};

struct Signature {
  std::array<std::uint8_t, kSignatureSize> bytes{};

  ByteView view() const { return {bytes.data(), bytes.size()}; }
  auto operator<=>(const Signature&) const = default;
};

using Digest = std::array<std::uint8_t, kDigestSize>;

struct KeyPair {
  VerificationKey vk;
  SigningKey sk;
};

// Every signed byte string starts with the domain tag of its kind.
enum class SignedKind : std::uint8_t {
  kUaCertificate = 1,
  kTaCertificate,
  kDeviceAttestation,
  kOemDeviceCertificate,
  kDepositConfirmation,
  kWithdrawConfirmation,
  kBalanceAttestation,
  kPayment,
  kRequestAuth,
};

inline constexpr SignedKind kAllSignedKinds[] = {
    SignedKind::kUaCertificate,        SignedKind::kTaCertificate,
    SignedKind::kDeviceAttestation,    SignedKind::kOemDeviceCertificate,
    SignedKind::kDepositConfirmation,  SignedKind::kWithdrawConfirmation,
    SignedKind::kBalanceAttestation,   SignedKind::kPayment,
    SignedKind::kRequestAuth,
};

struct SecurityConfig {
  // Security parameter in bits. Ed25519 offers 128; seeds carry 256 bits.
  unsigned lambda = 128;

  std::string_view domain_tag(SignedKind kind) const;

  // Throws Error(kBadKeyMaterial) if lambda is outside [128, 256].
  void validate() const;

  static const SecurityConfig& standard();
};

// Initializes the underlying crypto library. Idempotent and thread-safe;
// every entry point below calls it.
void init_library();

// Deterministic under a fixed rng state. The rng output is consumed as four
// 64-bit words in big-endian order to form the seed.
KeyPair keygen(const SecurityConfig& config, std::mt19937_64& rng);
// Seeds from the operating system's CSPRNG.
KeyPair keygen(const SecurityConfig& config);

Signature sign(ByteView msg, const SigningKey& sk);
// Raw-key variant; throws Error(kBadKeyMaterial) on a wrong-length key.
Signature sign(ByteView msg, ByteView sk_seed);

// Never throws; wrong-length signatures or keys simply fail.
bool sig_verify(ByteView msg, ByteView sig, ByteView vk);
inline bool sig_verify(ByteView msg, const Signature& sig,
                       const VerificationKey& vk) {
  return sig_verify(msg, sig.view(), vk.view());
}

Digest hash(ByteView x);

}  // namespace ops::crypto

#endif  // OPS_CRYPTO_H_
