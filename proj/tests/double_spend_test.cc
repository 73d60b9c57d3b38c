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

#include "ops/sim/double_spend.h"

namespace ops::sim {
namespace {

TEST(DoubleSpend, StrategyNames) {
  for (Strategy s : kAllStrategies) EXPECT_EQ(parse_strategy(strategy_name(s)), s);
  EXPECT_EQ(parse_strategy("print-money"), std::nullopt);
}

TEST(DoubleSpend, EveryStrategyDefeated) {
  SuiteReport suite = double_spend_suite(1, 10);
  EXPECT_EQ(suite.runs, 80u);
  for (const AttackResult& f : suite.failures) {
    ADD_FAILURE() << strategy_name(f.strategy) << " seed " << f.seed << " net gain "
                  << f.net_gain;
  }
  for (Strategy s : kAllStrategies) EXPECT_EQ(suite.defeated[s], 10u) << strategy_name(s);
}

TEST(DoubleSpend, AttacksActuallyAttempted) {
  // Every strategy leaves a trace of a rejected or neutralized step.
  for (Strategy s : kAllStrategies) {
    AttackPlan plan = build_attack(s, 3);
    ASSERT_LT(plan.attack_start, plan.script.steps.size()) << strategy_name(s);
    bool adversarial = false;
    for (std::size_t i = plan.attack_start; i < plan.script.steps.size(); ++i) {
      adversarial = adversarial || is_adversarial(plan.script.steps[i].action);
    }
    EXPECT_TRUE(adversarial || s == Strategy::kClaimClaim || s == Strategy::kCollectCollect)
        << strategy_name(s);
  }
}

TEST(DoubleSpend, HooksSeeEveryStep) {
  AttackPlan plan = build_attack(Strategy::kRollbackTa, 2);
  std::size_t steps = 0;
  bool finished = false;
  AttackHooks hooks;
  hooks.on_step = [&](const AttackPlan&, std::size_t, const Simulator&) { ++steps; };
  hooks.on_result = [&](const AttackPlan&, const AttackResult& r) {
    finished = true;
    EXPECT_TRUE(r.defeated());
  };
  AttackResult r = run_attack(plan, hooks);
  EXPECT_EQ(steps, plan.script.steps.size());
  EXPECT_TRUE(finished);
  EXPECT_GE(r.report.rollbacks_injected, 1u);
  EXPECT_EQ(r.report.rollbacks_injected, r.report.rollbacks_detected);
}

TEST(DoubleSpend, SameSeedSameTrace) {
  for (Strategy s : kAllStrategies) {
    AttackResult a = run_attack(build_attack(s, 17));
    AttackResult b = run_attack(build_attack(s, 17));
    EXPECT_EQ(encode_trace(a.trace), encode_trace(b.trace)) << strategy_name(s);
  }
}

}  // namespace
}  // namespace ops::sim
