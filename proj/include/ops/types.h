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

#ifndef OPS_TYPES_H_
#define OPS_TYPES_H_

#include <compare>
#include <cstdint>
#include <optional>

#include "ops/bytes.h"
#include "ops/crypto.h"

namespace ops {

enum class CertKind : std::uint8_t { kUa = 1, kTa = 2 };

// A verification key endorsed by the server. The kind byte is part of the
// canonical encoding, so a UA certificate can never pass as a TA one.
struct Certificate {
  crypto::VerificationKey vk;
  CertKind kind = CertKind::kUa;
  crypto::Signature sig;

  bool operator==(const Certificate&) const = default;
};

// Log-membership key for received and claimed payments.
struct PaymentKey {
  crypto::VerificationKey sender_vk;
  std::uint64_t index = 0;

  auto operator<=>(const PaymentKey&) const = default;
};

// A signed offline payment. The signature covers amount, sender, receiver
// and index; created_at is unsigned metadata and never compared.
struct Payment {
  Amount amount = 0;
  Certificate sender;
  Certificate receiver;
  std::uint64_t index = 0;
  crypto::Signature sig;
  std::optional<std::uint64_t> created_at;

  // Equality of the canonical signed bytes.
  bool operator==(const Payment& other) const;
};

}  // namespace ops

#endif  // OPS_TYPES_H_
