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

#include "ops/device.h"

#include "ops/codec.h"
#include "ops/error.h"

namespace ops::wallet {

OemAuthority OemAuthority::create(std::mt19937_64& rng) {
  return OemAuthority(crypto::keygen(crypto::SecurityConfig::standard(), rng));
}

DeviceIdentity OemAuthority::provision_device(std::string model,
                                              std::mt19937_64& rng) const {
  DeviceIdentity device;
  device.device_keys = crypto::keygen(crypto::SecurityConfig::standard(), rng);
  device.oem_cert = crypto::sign(
      codec::oem_device_bytes(device.device_keys.vk, model), root_.sk);
  device.model = std::move(model);
  return device;
}

bool device_cert_verify(const crypto::VerificationKey& device_vk,
                        std::string_view model,
                        const crypto::Signature& oem_cert,
                        const crypto::VerificationKey& root_vk) {
  return crypto::sig_verify(codec::oem_device_bytes(device_vk, model), oem_cert,
                            root_vk);
}

crypto::Signature tos_attest(const DeviceIdentity& device,
                             const crypto::VerificationKey& ta_vk) {
  if (!device.ta_provisioned) throw Error(ErrorCode::kNoTa);
  return crypto::sign(codec::device_attestation_bytes(ta_vk, device.model),
                      device.device_keys.sk);
}

}  // namespace ops::wallet
