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

// Line-oriented scenario scripts for the simulator.
//
//   seed 42
//   actor alice tee model=Pixel-7
//   actor bob plain
//   register alice
//   pay alice bob 25        # trailing comments are allowed
//
// Frame references: "#7" is the seventh frame captured in the run,
// "last:PaymentTransfer" the most recent frame of that kind, and
// "next:WithdrawConfirmed" the next one yet to be sent.

#ifndef OPS_SIM_SCENARIO_H_
#define OPS_SIM_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ops/bytes.h"
#include "ops/messages.h"

namespace ops::sim {

struct ActorDecl {
  std::string name;
  bool tee = false;
  std::string model = "generic";
  bool operator==(const ActorDecl&) const = default;
};

enum class Action : std::uint8_t {
  // honest
  kRegister,
  kSetupTa,
  kMint,
  kDeposit,
  kWithdraw,
  kPay,
  kClaim,
  kCollect,
  kRetry,
  kGoOffline,
  kGoOnline,
  // adversarial
  kSnapshotTaStore,
  kRollbackTaStore,
  kCrash,
  kDrop,
  kTamper,
  kReplay,
  kResubmit,
  kInjectCollect,
  kInjectClaim,
  kReorder,
};

std::string_view action_name(Action action);
bool is_adversarial(Action action);

struct FrameRef {
  enum class Mode : std::uint8_t { kIndex, kLast, kNext };
  Mode mode = Mode::kIndex;
  std::uint64_t index = 0;
  MsgKind kind = MsgKind::kClientRegister;
  bool operator==(const FrameRef&) const = default;
};

std::string format_ref(const FrameRef& ref);

enum class CrashSite : std::uint8_t {
  kDepositBeforePersist,
  kWithdrawAfterPersist,
  kWithdrawBeforeSend,
  kPayAfterPersist,
  kCollectBeforePersist,
};

std::string_view crash_site_name(CrashSite site);

// Reserved snapshot name that restores the last blob the TA itself wrote.
inline constexpr std::string_view kGenuineSnapshot = "@genuine";

struct Step {
  Action action = Action::kRegister;
  std::string actor;
  // Second actor: pay receiver, optional replay target.
  std::string peer;
  Amount amount = 0;
  // Snapshot name.
  std::string label;
  FrameRef ref;
  std::uint64_t offset = 0;
  std::uint8_t mask = 0;
  std::uint32_t window = 0;
  CrashSite crash = CrashSite::kPayAfterPersist;
  // 1-based source line, 0 for generated steps.
  int line = 0;

  bool operator==(const Step& o) const;
};

// Canonical one-line rendering; parse_step(format_step(s)) == s.
std::string format_step(const Step& step);

struct ScenarioScript {
  std::uint64_t seed = 0;
  std::vector<ActorDecl> actors;
  std::vector<Step> steps;
};

// Throws Error(kScript) naming the offending line. Checks that actors are
// declared, snapshot names are taken before use, and refs are well formed.
ScenarioScript parse_scenario(std::string_view text);
Step parse_step(std::string_view line);
std::string format_scenario(const ScenarioScript& script);

// Same checks as the parser, for programmatically built scripts.
void validate(const ScenarioScript& script);

}  // namespace ops::sim

#endif  // OPS_SIM_SCENARIO_H_
