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

// Emulated secure hardware: device key pairs burned in by an OEM and the
// trusted OS attestation over a trusted application's key.

#ifndef OPS_DEVICE_H_
#define OPS_DEVICE_H_

#include <random>
#include <string>

#include "ops/crypto.h"

namespace ops::wallet {

struct DeviceIdentity {
  crypto::KeyPair device_keys;
  std::string model;
  // OEM root signature over (device vk, model).
  crypto::Signature oem_cert;
  bool ta_provisioned = true;
};

class OemAuthority {
 public:
  explicit OemAuthority(crypto::KeyPair root) : root_(std::move(root)) {}
  static OemAuthority create(std::mt19937_64& rng);

  const crypto::VerificationKey& root_vk() const { return root_.vk; }

  // Local provisioning: the device ships with the OPS TA installed.
  DeviceIdentity provision_device(std::string model,
                                  std::mt19937_64& rng) const;

 private:
  crypto::KeyPair root_;
};

bool device_cert_verify(const crypto::VerificationKey& device_vk,
                        std::string_view model,
                        const crypto::Signature& oem_cert,
                        const crypto::VerificationKey& root_vk);

// Signs (ta_vk, "Secure Device" || model) with the device key.
// Throws Error(kNoTa) if the device was not provisioned with the TA.
crypto::Signature tos_attest(const DeviceIdentity& device,
                             const crypto::VerificationKey& ta_vk);

}  // namespace ops::wallet

#endif  // OPS_DEVICE_H_
