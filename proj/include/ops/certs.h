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

// Certificate-verification predicates. None of them throw.

#ifndef OPS_CERTS_H_
#define OPS_CERTS_H_

#include <string_view>

#include "ops/crypto.h"
#include "ops/types.h"

namespace ops::crypto {

// 1 iff cert is UA-kind and cert.sig verifies over cert.vk under server_vk.
bool cert_verify(const Certificate& cert, const VerificationKey& server_vk);

// 1 iff cert is TA-kind and cert.sig verifies over (cert.vk, "TA").
bool hw_cert_verify(const Certificate& cert, const VerificationKey& server_vk);

// 1 iff attestation verifies over (vk, "Secure Device" || model) under the
// device key.
bool oem_cert_verify(const VerificationKey& vk, const Signature& attestation,
                     const VerificationKey& device_vk, std::string_view model);

Certificate issue_ua_certificate(const VerificationKey& vk,
                                 const SigningKey& server_sk);
Certificate issue_ta_certificate(const VerificationKey& vk,
                                 const SigningKey& server_sk);

}  // namespace ops::crypto

namespace ops {

// Payment verification: the sender certificate is a server-issued TA
// certificate and the signature verifies over the four signed fields.
bool pay_verify(const Payment& p, const crypto::VerificationKey& server_vk);

}  // namespace ops

#endif  // OPS_CERTS_H_
