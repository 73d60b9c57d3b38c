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

// Replay-protected storage for trusted-application state.
//
// The engine holds a secret key and a monotonically increasing write counter
// (MIC). The blob itself sits in untrusted storage and can be copied or
// replaced by anyone; only the engine counter cannot be rolled back.
//
// Blob layout:
//   u8  format version (1)
//   u64 mic, big-endian
//   16  byte Poly1305 tag over (version, mic, ciphertext)
//   ... XChaCha20 ciphertext of the state

#ifndef OPS_SECURE_STORE_H_
#define OPS_SECURE_STORE_H_

#include <array>
#include <cstdint>
#include <random>

#include "ops/bytes.h"

namespace ops::ta {

inline constexpr std::uint8_t kBlobVersion = 1;
inline constexpr std::size_t kBlobMacSize = 16;
inline constexpr std::size_t kBlobHeaderSize = 1 + 8 + kBlobMacSize;

class SecureStore {
 public:
  using Key = std::array<std::uint8_t, 32>;

  explicit SecureStore(const Key& mac_key) : mac_key_(mac_key) {}
  static SecureStore create(std::mt19937_64& rng);

  // Seals plaintext under mic + 1, then swaps the blob and bumps the counter.
  // Either both happen or neither does.
  void write(ByteView plaintext);

  // Throws kNotInitialized before the first write, kRollbackDetected if the
  // blob's counter differs from the engine's, kTamperDetected on any
  // authentication or format failure.
  Bytes read() const { return open(blob_); }
  // Same checks, against an arbitrary blob.
  Bytes open(ByteView blob) const;

  std::uint64_t mic() const { return mic_; }
  bool empty() const { return mic_ == 0; }

  // Untrusted-side access, used by the simulator for snapshot and restore.
  const Bytes& blob() const { return blob_; }
  void replace_blob(Bytes blob) { blob_ = std::move(blob); }

 private:
  Key mac_key_{};
  std::uint64_t mic_ = 0;
  Bytes blob_;
};

}  // namespace ops::ta

#endif  // OPS_SECURE_STORE_H_
