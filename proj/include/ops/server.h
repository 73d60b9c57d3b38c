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

#ifndef OPS_SERVER_H_
#define OPS_SERVER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>

#include "ops/bytes.h"
#include "ops/crypto.h"
#include "ops/messages.h"
#include "ops/types.h"

namespace ops::server {

// One registry entry, keyed by the UA verification key.
struct Account {
  std::optional<crypto::VerificationKey> ta_vk;
  Amount onbal = 0;
  std::uint64_t idctr = 0;
  // Highest request nonce seen from this UA key.
  std::uint64_t last_nonce = 0;
  // The last authenticated request and its response, for idempotent retry.
  Bytes last_request;
  Bytes last_response;

  bool operator==(const Account&) const = default;
};

struct ServerState {
  crypto::KeyPair keys;
  std::map<crypto::VerificationKey, Account> accounts;
  // Reverse index TA vk -> UA vk.
  std::map<crypto::VerificationKey, crypto::VerificationKey> ta_owner;
  std::set<PaymentKey> plog;
  std::set<crypto::VerificationKey> oem_roots;
  Amount minted_total = 0;

  bool operator==(const ServerState& o) const;
};

// Builds a client->server message signed by the UA key.
WireMessage make_authed(MessageBody body, const crypto::KeyPair& ua_keys,
                        std::uint64_t nonce);

// The trusted server. Handlers run one at a time; callers serialize access.
class Server {
 public:
  explicit Server(crypto::KeyPair keys);
  static Server create(std::mt19937_64& rng);

  const crypto::VerificationKey& vk() const { return state_.keys.vk; }
  void add_oem_root(const crypto::VerificationKey& root);

  // Typed handlers. Each throws Error with the abort reason.
  Certificate register_client(const WireMessage& req);
  Certificate register_ta(const WireMessage& req);
  DepositConfirmed handle_deposit(const WireMessage& req);
  WithdrawConfirmed handle_withdraw(const WireMessage& req);
  ClaimConfirmed handle_claim(const WireMessage& req);

  // Harness-only faucet; never reachable from the wire.
  void mint(const crypto::VerificationKey& ua_vk, Amount x);

  // Wire entry point: decode, dispatch, encode. Aborts come back as a
  // Rejected message. A byte-identical retry of an account's last request
  // gets the cached response without re-executing.
  Bytes handle_frame(ByteView request);

  // Snapshot: "OPSS" | u8 version | state | sha256 of everything before.
  Bytes snapshot() const;
  static Server from_snapshot(ByteView bytes);
  void persist(const std::filesystem::path& path) const;
  static Server restore(const std::filesystem::path& path);

  const ServerState& state() const { return state_; }
  const Account* account(const crypto::VerificationKey& ua_vk) const;
  // UA key owning a TA key, if any.
  std::optional<crypto::VerificationKey> owner_of_ta(
      const crypto::VerificationKey& ta_vk) const;

 private:
  Server() = default;
  // Verifies the auth envelope and nonce. Returns the account, or nullptr
  // for a correctly signed request from an unregistered key.
  Account* authenticate(const WireMessage& req);
  Account& require_account(const WireMessage& req);
  Bytes dispatch(const WireMessage& req);

  ServerState state_;
};

}  // namespace ops::server

#endif  // OPS_SERVER_H_
