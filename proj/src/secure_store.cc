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

#include "ops/secure_store.h"

#include <sodium.h>

#include <limits>

#include "ops/crypto.h"
#include "ops/error.h"
#include "ops/wire_format.h"

namespace ops::ta {
namespace {

using Nonce = std::array<std::uint8_t, crypto_aead_xchacha20poly1305_ietf_NPUBBYTES>;

// The (key, mic) pair never repeats, so the counter doubles as the nonce.
Nonce nonce_for(std::uint64_t mic) {
  Nonce n{};
  static constexpr char kPrefix[] = "ops-rpmb";
  std::copy(kPrefix, kPrefix + 8, n.begin());
  for (int i = 0; i < 8; ++i) {
    n[8 + i] = static_cast<std::uint8_t>(mic >> (56 - 8 * i));
  }
  return n;
}

Bytes header_ad(std::uint64_t mic) {
  Writer w;
  w.u8(kBlobVersion).u64(mic);
  return std::move(w).take();
}

}  // namespace

SecureStore SecureStore::create(std::mt19937_64& rng) {
  Key key{};
  for (std::size_t i = 0; i < key.size(); i += 8) {
    std::uint64_t v = rng();
    for (int j = 0; j < 8; ++j) key[i + j] = static_cast<std::uint8_t>(v >> (8 * j));
  }
  return SecureStore(key);
}

void SecureStore::write(ByteView plaintext) {
  if (mic_ == std::numeric_limits<std::uint64_t>::max()) {
    throw Error(ErrorCode::kCounterOverflow, "secure store counter");
  }
  crypto::init_library();
  const std::uint64_t next = mic_ + 1;
  const Bytes ad = header_ad(next);
  const Nonce nonce = nonce_for(next);

  Bytes blob(kBlobHeaderSize + plaintext.size());
  std::copy(ad.begin(), ad.end(), blob.begin());
  unsigned long long mac_len = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt_detached(
      blob.data() + kBlobHeaderSize, blob.data() + ad.size(), &mac_len,
      plaintext.data(), plaintext.size(), ad.data(), ad.size(), nullptr,
      nonce.data(), mac_key_.data());

  blob_ = std::move(blob);
  mic_ = next;
}

Bytes SecureStore::open(ByteView blob) const {
  if (mic_ == 0) throw Error(ErrorCode::kNotInitialized);
  if (blob.size() < kBlobHeaderSize || blob[0] != kBlobVersion) {
    throw Error(ErrorCode::kTamperDetected, "blob header");
  }
  crypto::init_library();
  Reader header(blob.subspan(1, 8));
  const std::uint64_t stored_mic = header.u64();
  if (stored_mic != mic_) throw Error(ErrorCode::kRollbackDetected);

  const Bytes ad = header_ad(stored_mic);
  const Nonce nonce = nonce_for(stored_mic);
  Bytes plain(blob.size() - kBlobHeaderSize);
  if (crypto_aead_xchacha20poly1305_ietf_decrypt_detached(
          plain.data(), nullptr, blob.data() + kBlobHeaderSize, plain.size(),
          blob.data() + 9, ad.data(), ad.size(), nonce.data(),
          mac_key_.data()) != 0) {
    throw Error(ErrorCode::kTamperDetected);
  }
  return plain;
}

}  // namespace ops::ta
