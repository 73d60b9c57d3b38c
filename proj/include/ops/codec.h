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

// Canonical encoding of every protocol structure. The same bytes are signed,
// sent on the wire and stored in fixtures.
//
//   Certificate     u8 kind (1=UA, 2=TA) | bytes vk | bytes sig
//   Payment         u64 amount | Certificate sender | Certificate receiver |
//                   u64 index | bytes sig | u8 has_time [| u64 created_at]
//   PaymentKey      bytes sender_vk | u64 index
//   WireMessage     u8 kind | body | u8 has_auth [| bytes vk | u64 nonce |
//                   bytes sig]
//   Frame           u32 length | WireMessage
//
// Signed byte strings are `string domain_tag | fields...`, see the
// *_bytes functions below. Amounts are always >= 1.

#ifndef OPS_CODEC_H_
#define OPS_CODEC_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "ops/bytes.h"
#include "ops/crypto.h"
#include "ops/messages.h"
#include "ops/types.h"
#include "ops/wire_format.h"

namespace ops::codec {

inline constexpr std::string_view kTaTag = "TA";
inline constexpr std::string_view kSecureDeviceTag = "Secure Device";

// Nested writers and readers, used by the top-level codecs and by the state
// snapshot formats.
void write_certificate(Writer& w, const Certificate& cert);
Certificate read_certificate(Reader& r);
void write_payment(Writer& w, const Payment& p);
Payment read_payment(Reader& r);
void write_payment_key(Writer& w, const PaymentKey& key);
PaymentKey read_payment_key(Reader& r);
crypto::VerificationKey read_vk(Reader& r);
crypto::Signature read_sig(Reader& r);
// Rejects 0 with kMalformed.
Amount read_amount(Reader& r);

Bytes encode(const Certificate& cert);
Bytes encode(const Payment& p);
Bytes encode(const PaymentKey& key);
Bytes encode(const WireMessage& msg);
Bytes encode_body(const MessageBody& body);

Certificate decode_certificate(ByteView bytes);
Payment decode_payment(ByteView bytes);
PaymentKey decode_payment_key(ByteView bytes);
// Throws kWrongKind when expected is set and the tag differs.
WireMessage decode_message(ByteView bytes,
                           std::optional<MsgKind> expected = std::nullopt);

// Signed byte strings.
Bytes ua_certificate_bytes(const crypto::VerificationKey& vk);
Bytes ta_certificate_bytes(const crypto::VerificationKey& vk);
Bytes device_attestation_bytes(const crypto::VerificationKey& ta_vk,
                               std::string_view model);
Bytes oem_device_bytes(const crypto::VerificationKey& device_vk,
                       std::string_view model);
Bytes deposit_confirmation_bytes(const crypto::VerificationKey& ta_vk,
                                 Amount amount, std::uint64_t id);
Bytes withdraw_confirmation_bytes(Amount amount, std::uint64_t id);
Bytes balance_bytes(Amount balance, std::uint64_t id);
Bytes payment_signed_bytes(const Payment& p);
Bytes request_auth_bytes(MsgKind kind, ByteView body, std::uint64_t nonce);

PaymentKey payment_key(const Payment& p);

// Length-prefixed framing over byte streams.
Bytes frame(ByteView message);
void write_frame(std::ostream& out, ByteView message);
// nullopt on clean end-of-stream; kMalformed on a short frame.
std::optional<Bytes> read_frame(std::istream& in);

}  // namespace ops::codec

#endif  // OPS_CODEC_H_
