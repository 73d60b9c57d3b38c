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

#include <algorithm>

#include "ops/codec.h"
#include "ops/sim/simulator.h"
#include "ops/sim/trace.h"

namespace ops::sim {
namespace {

TEST(Trace, EventsRoundTrip) {
  Trace t = {
      StepEvent{3, "pay alice bob 2"},
      FrameEvent{7, "alice", "bob", FrameFate::kTampered, Bytes{9, 1, 2}},
      OutcomeEvent{"bob", ErrorCode::kInvalidPayment, "tampered"},
      OutcomeEvent{"alice", ErrorCode::kOk, "collected"},
      AuditEvent{10, 4, 5, 1, 0},
      ViolationEvent{3, "conservation", "x"},
      WarningEvent{4, "destroyed 1"},
  };
  for (const TraceEvent& e : t) EXPECT_EQ(decode_event(encode_event(e)), e);
  std::string text = encode_trace(t);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  EXPECT_EQ(decode_trace(text), t);
  EXPECT_THROW(decode_trace("zz\n"), Error);
  EXPECT_THROW(decode_trace("ff\n"), Error);
}

TEST(Trace, DemoTraceDecodes) {
  RunResult run = run_scenario(demo_scenario());
  std::string text = encode_trace(run.trace);
  EXPECT_EQ(decode_trace(text), run.trace);
  EXPECT_TRUE(check_trace(decode_trace(text)).empty());
}

TEST(Trace, FrameKind) {
  FrameEvent f{1, "a", "server", FrameFate::kDelivered,
               codec::encode(WireMessage{DepositReq{1}, std::nullopt})};
  EXPECT_EQ(f.kind(), MsgKind::kDepositReq);
  EXPECT_TRUE(f.server_bound());
  f.payload.clear();
  EXPECT_EQ(f.kind(), std::nullopt);
}

TEST(Trace, CheckerFindsPlantedProblems) {
  RunResult clean = run_scenario(demo_scenario());
  EXPECT_TRUE(check_trace(clean.trace).empty());

  // A server-bound frame inside a pay step.
  Trace t = {StepEvent{1, "pay alice bob 1"},
             FrameEvent{1, "alice", "server", FrameFate::kDelivered, Bytes{5}}};
  auto f = check_trace(t);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].property, "offline-verifiability");

  // Even an attempt that never left the device counts.
  t[1] = FrameEvent{1, "alice", "server", FrameFate::kBlocked, Bytes{5}};
  EXPECT_EQ(check_trace(t).size(), 1u);

  Trace unbalanced = {StepEvent{1, "mint a 1"}, AuditEvent{5, 1, 1, 1, 1}};
  f = check_trace(unbalanced);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].property, "conservation");

  Trace violated = {StepEvent{2, "x"}, ViolationEvent{2, "rollback", "y"}};
  EXPECT_EQ(check_trace(violated).size(), 1u);
}

}  // namespace
}  // namespace ops::sim
