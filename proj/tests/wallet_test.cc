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

#include <gtest/gtest.h>

#include "ops/codec.h"
#include "ops/wallet.h"
#include "support/world.h"

namespace ops::wallet {
namespace {

using ops::testing::Client;
using ops::testing::code_of;
using ops::testing::DeadLink;
using ops::testing::FnLink;
using ops::testing::World;

// Delivers requests but loses the next `n` responses.
FnLink lossy(World& w, int& n) {
  return FnLink([&w, &n](ByteView req) -> std::optional<Bytes> {
    Bytes resp = w.server.handle_frame(req);
    if (n > 0) {
      --n;
      return std::nullopt;
    }
    return resp;
  });
}

TEST(Wallet, LostDepositResponseIsRecovered) {
  World w(71);
  Client a = w.client();
  w.server.mint(a.wallet.vk(), 10);
  int lose = 1;
  FnLink link = lossy(w, lose);
  EXPECT_EQ(code_of([&] { a.wallet.do_deposit(link, 4); }), ErrorCode::kNoResponse);
  EXPECT_TRUE(a.wallet.state().pending);
  EXPECT_EQ(w.server.account(a.wallet.vk())->onbal, 6u);
  EXPECT_EQ(a.wallet.ta()->store_read().bal, 0u);

  a.wallet.resume(link);
  EXPECT_FALSE(a.wallet.state().pending);
  EXPECT_EQ(a.wallet.ta()->store_read().bal, 4u);
  EXPECT_EQ(w.server.account(a.wallet.vk())->onbal, 6u);
}

TEST(Wallet, LostWithdrawResponseCreditsOnce) {
  World w(72);
  Client a = w.client();
  w.server.mint(a.wallet.vk(), 10);
  a.wallet.do_deposit(w.link, 10);
  int lose = 1;
  FnLink link = lossy(w, lose);
  EXPECT_EQ(code_of([&] { a.wallet.do_withdraw(link, 3); }), ErrorCode::kNoResponse);
  a.wallet.resume(link);
  a.wallet.resume(link);
  EXPECT_EQ(w.server.account(a.wallet.vk())->onbal, 3u);
  EXPECT_EQ(w.server.account(a.wallet.vk())->idctr, a.wallet.ta()->store_read().id);
}

TEST(Wallet, WithdrawCrashIsReissued) {
  World w(73);
  Client a = w.client();
  w.server.mint(a.wallet.vk(), 5);
  a.wallet.do_deposit(w.link, 5);
  a.wallet.ta()->arm_crash(ta::CrashPoint::kWithdrawAfterPersist);
  EXPECT_EQ(code_of([&] { a.wallet.do_withdraw(w.link, 2); }), ErrorCode::kCrashed);
  EXPECT_TRUE(a.wallet.state().withdraw_needs_reissue);
  a.wallet.resume(w.link);
  EXPECT_EQ(w.server.account(a.wallet.vk())->onbal, 2u);
  EXPECT_EQ(a.wallet.ta()->store_read().bal, 3u);
}

TEST(Wallet, WalletCrashBeforeSendKeepsRequest) {
  World w(74);
  Client a = w.client();
  w.server.mint(a.wallet.vk(), 5);
  a.wallet.do_deposit(w.link, 5);
  a.wallet.arm_crash(WalletCrash::kWithdrawBeforeSend);
  EXPECT_EQ(code_of([&] { a.wallet.do_withdraw(w.link, 5); }), ErrorCode::kCrashed);
  ASSERT_TRUE(a.wallet.state().pending);
  a.wallet.resume(w.link);
  EXPECT_EQ(w.server.account(a.wallet.vk())->onbal, 5u);
}

TEST(Wallet, ServerUnreachable) {
  World w(75);
  Client a = w.client();
  DeadLink dead;
  Client b = w.client(false, false);
  EXPECT_EQ(code_of([&] { b.wallet.setup_client(dead); }), ErrorCode::kNoResponse);
  EXPECT_FALSE(b.wallet.registered());
  EXPECT_EQ(code_of([&] { a.wallet.do_deposit(dead, 1); }), ErrorCode::kNoResponse);
}

TEST(Wallet, PreconditionsChecked) {
  World w(76);
  Client plain = w.client(false);
  Client unregistered = w.client(true, false);
  EXPECT_EQ(code_of([&] { plain.wallet.do_deposit(w.link, 1); }), ErrorCode::kNoTa);
  EXPECT_EQ(code_of([&] { unregistered.wallet.do_withdraw(w.link, 1); }),
            ErrorCode::kNotRegistered);
  EXPECT_EQ(code_of([&] { unregistered.wallet.request_payment(1); }),
            ErrorCode::kNotRegistered);
  EXPECT_EQ(code_of([&] { plain.wallet.request_payment(0); }), ErrorCode::kInvalidAmount);
  EXPECT_EQ(code_of([&] { plain.wallet.make_payment(plain.wallet.request_payment(1)); }),
            ErrorCode::kNoTa);
}

TEST(Wallet, TaAddressedPaymentCannotBeClaimed) {
  World w(77);
  Client a = w.client();
  Client b = w.client();
  w.server.mint(a.wallet.vk(), 5);
  a.wallet.do_deposit(w.link, 5);
  PayReq req = b.wallet.request_payment(2);
  Payment p = a.wallet.make_payment(req);
  ASSERT_TRUE(b.wallet.accept_payment(p, req).accepted);
  EXPECT_EQ(b.wallet.do_claim(w.link), 0u);
  EXPECT_EQ(code_of([&] { b.wallet.do_claim(w.link, p); }), ErrorCode::kMustBeCollected);
  EXPECT_EQ(b.wallet.collect_pending(), 1u);
  EXPECT_EQ(b.wallet.ta()->store_read().bal, 2u);
  EXPECT_EQ(w.server.account(b.wallet.vk())->onbal, 0u);
}

TEST(Wallet, SnapshotRoundTrip) {
  World w(78);
  Client a = w.client();
  Client c = w.client(false);
  w.server.mint(a.wallet.vk(), 8);
  a.wallet.do_deposit(w.link, 8);
  PayReq req = c.wallet.request_payment(3);
  Payment p = a.wallet.make_payment(req, 17);
  c.wallet.accept_payment(p, req);

  for (Wallet* wl : {&a.wallet, &c.wallet}) {
    Bytes snap = wl->snapshot();
    Wallet back = Wallet::from_snapshot(snap, w.server.vk());
    EXPECT_EQ(back.snapshot(), snap);
    EXPECT_EQ(back.vk(), wl->vk());
    EXPECT_EQ(back.state().inbox, wl->state().inbox);
    EXPECT_EQ(back.state().iplog, wl->state().iplog);
    EXPECT_EQ(back.state().nonce, wl->state().nonce);
    Bytes bad = snap;
    bad[bad.size() / 2] ^= 1;
    EXPECT_EQ(code_of([&] { Wallet::from_snapshot(bad, w.server.vk()); }),
              ErrorCode::kCorruptState);
  }

  // A restored wallet keeps its replay protection and can still claim.
  Wallet restored = Wallet::from_snapshot(c.wallet.snapshot(), w.server.vk());
  EXPECT_EQ(restored.accept_payment(p, req).reason, ErrorCode::kReplayedPayment);
  EXPECT_EQ(restored.do_claim(w.link), 1u);
  EXPECT_EQ(w.server.account(c.wallet.vk())->onbal, 3u);
}

TEST(Wallet, ClaimAlreadyClaimedArchives) {
  World w(79);
  Client a = w.client();
  Client c = w.client(false);
  w.server.mint(a.wallet.vk(), 4);
  a.wallet.do_deposit(w.link, 4);
  PayReq req = c.wallet.request_payment(4);
  Payment p = a.wallet.make_payment(req);
  c.wallet.accept_payment(p, req);
  Wallet twin = Wallet::from_snapshot(c.wallet.snapshot(), w.server.vk());
  EXPECT_EQ(c.wallet.do_claim(w.link), 1u);
  // The twin sends the same signed request and gets the cached answer.
  EXPECT_EQ(twin.do_claim(w.link), 1u);
  EXPECT_TRUE(twin.state().inbox.empty());
  EXPECT_EQ(w.server.account(c.wallet.vk())->onbal, 4u);
}

}  // namespace
}  // namespace ops::wallet
