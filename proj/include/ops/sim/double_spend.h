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

// Double-spend strategy catalogue and seeded scenario generation.

#ifndef OPS_SIM_DOUBLE_SPEND_H_
#define OPS_SIM_DOUBLE_SPEND_H_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ops/sim/scenario.h"
#include "ops/sim/simulator.h"

namespace ops::sim {

enum class Strategy : std::uint8_t {
  kClaimClaim,
  kCollectCollect,
  kClaimCollect,
  kReplayDeposit,
  kReplayWithdraw,
  kReplayPayment,
  kForwardPayment,
  kRollbackTa,
};

inline constexpr std::array<Strategy, 8> kAllStrategies = {
    Strategy::kClaimClaim,     Strategy::kCollectCollect, Strategy::kClaimCollect,
    Strategy::kReplayDeposit,  Strategy::kReplayWithdraw, Strategy::kReplayPayment,
    Strategy::kForwardPayment, Strategy::kRollbackTa,
};

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

// Actors: alice, bob, carol (TEE) and dave (no TEE), all registered and
// funded. The script is the honest prefix followed by the strategy; steps
// from attack_start on are the adversarial phase.
struct AttackPlan {
  Strategy strategy = Strategy::kClaimClaim;
  ScenarioScript script;
  std::size_t attack_start = 0;
};

// random_steps honest actions drawn from the seed precede the strategy.
AttackPlan build_attack(Strategy strategy, std::uint64_t seed,
                        std::size_t random_steps = 6);

struct AttackResult {
  Strategy strategy = Strategy::kClaimClaim;
  std::uint64_t seed = 0;
  AuditReport report;
  Trace trace;
  // Change in each actor's holdings over the adversarial phase.
  std::map<std::string, std::int64_t> gain;
  std::int64_t net_gain = 0;

  // Zero violations and nobody richer after the attack.
  bool defeated() const;
};

// Optional observers. on_step runs after every step with the simulator in
// its post-step state; on_result runs once per finished attack.
struct AttackHooks {
  std::function<void(const AttackPlan&, std::size_t, const Simulator&)> on_step;
  std::function<void(const AttackPlan&, const AttackResult&)> on_result;
};

AttackResult run_attack(const AttackPlan& plan, const AttackHooks& hooks = {});

struct SuiteReport {
  std::size_t runs = 0;
  std::map<Strategy, std::size_t> defeated;
  std::vector<AttackResult> failures;
  bool ok() const { return failures.empty(); }
};

// Every strategy over seeds [first_seed, first_seed + seeds).
SuiteReport double_spend_suite(std::uint64_t first_seed = 1,
                               std::size_t seeds = 1000,
                               const AttackHooks& hooks = {});

struct GenOptions {
  std::size_t actors = 3;
  std::size_t steps = 20;
  Amount max_amount = 3;
  // Adds drops, tampering, replays, crashes, rollbacks and reordering.
  bool adversarial = false;
};

// Random but valid script: every frame ref it emits resolves. Setup steps
// (register, TA activation, funding) come first.
ScenarioScript generate_scenario(std::uint64_t seed, const GenOptions& options);

}  // namespace ops::sim

#endif  // OPS_SIM_DOUBLE_SPEND_H_
