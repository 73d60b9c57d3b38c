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

#include "ops/error.h"
#include "ops/sim/double_spend.h"
#include "ops/sim/scenario.h"
#include "support/world.h"

namespace ops::sim {
namespace {

using ops::testing::code_of;

TEST(Scenario, ParsesEveryCommand) {
  const char* text = R"(seed 5
actor alice tee model=Pixel-7
actor bob plain   # comment
register alice
register bob
setup_ta alice
mint alice 10
deposit alice 5
withdraw alice 1
pay alice bob 2
claim bob
collect alice
retry alice
go_offline bob
go_online bob
snapshot_ta_store alice s1
rollback_ta_store alice s1
rollback_ta_store alice @genuine
crash alice pay-after-persist
drop next:DepositConfirmed
tamper next:PaymentTransfer 3 255
replay last:ClaimReq
replay #2 bob
resubmit alice last:WithdrawReq
inject-collect alice last:PaymentTransfer
inject-claim bob last:ClaimReq
reorder 3
)";
  ScenarioScript s = parse_scenario(text);
  EXPECT_EQ(s.seed, 5u);
  ASSERT_EQ(s.actors.size(), 2u);
  EXPECT_TRUE(s.actors[0].tee);
  EXPECT_EQ(s.actors[0].model, "Pixel-7");
  EXPECT_FALSE(s.actors[1].tee);
  EXPECT_EQ(s.steps.size(), 24u);
  EXPECT_EQ(s.steps[6].action, Action::kPay);
  EXPECT_EQ(s.steps[6].peer, "bob");
  EXPECT_EQ(s.steps[6].amount, 2u);
  EXPECT_EQ(s.steps[6].line, 10);

  // Canonical rendering parses back to the same script.
  ScenarioScript again = parse_scenario(format_scenario(s));
  ASSERT_EQ(again.steps.size(), s.steps.size());
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    Step a = s.steps[i], b = again.steps[i];
    a.line = b.line = 0;
    EXPECT_EQ(a, b) << format_step(s.steps[i]);
    EXPECT_EQ(parse_step(format_step(s.steps[i])).action, s.steps[i].action);
  }
}

TEST(Scenario, RejectsBadScripts) {
  const char* bad[] = {
      "actor a tee\nfly a",
      "actor a tee\nregister b",
      "actor a tee\nactor a plain",
      "actor a robot",
      "seed 1\nseed 2",
      "actor a tee\npay a a 1",
      "actor a tee\nmint a x",
      "actor a tee\nrollback_ta_store a nope",
      "actor a tee\nsnapshot_ta_store a @genuine",
      "actor a tee\ndrop last:DepositReq",
      "actor a tee\nreplay next:DepositReq",
      "actor a tee\ntamper next:DepositReq 1 0",
      "actor a tee\nreorder 1",
      "actor a tee\ncrash a nowhere",
      "actor server tee",
      "actor a tee\nregister a\nactor b tee",
      "actor a tee\nreplay last:Nonsense",
  };
  for (const char* text : bad) {
    EXPECT_EQ(code_of([&] { parse_scenario(text); }), ErrorCode::kScript) << text;
  }
}

TEST(Scenario, ErrorsNameTheLine) {
  try {
    parse_scenario("actor a tee\nregister a\nregister zed\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Scenario, ValidateMatchesParser) {
  ScenarioScript s = parse_scenario("actor a tee\nregister a\n");
  EXPECT_NO_THROW(validate(s));
  Step ghost;
  ghost.action = Action::kRegister;
  ghost.actor = "ghost";
  s.steps.push_back(ghost);
  EXPECT_EQ(code_of([&] { validate(s); }), ErrorCode::kScript);
}

TEST(Scenario, GeneratedScriptsAreValid) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GenOptions o;
    o.adversarial = seed % 2 == 0;
    ScenarioScript s = generate_scenario(seed, o);
    EXPECT_NO_THROW(validate(s));
    EXPECT_NO_THROW(parse_scenario(format_scenario(s)));
  }
}

}  // namespace
}  // namespace ops::sim
