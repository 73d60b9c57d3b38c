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

#include "ops/sim/double_spend.h"

#include <random>

#include "ops/error.h"

namespace ops::sim {
namespace {

constexpr std::array<std::string_view, 8> kStrategyNames = {
    "claim-claim",    "collect-collect", "claim-collect",   "replay-deposit",
    "replay-withdraw", "replay-payment", "forward-payment", "rollback-ta",
};

constexpr std::array<std::string_view, 4> kNames = {"alice", "bob", "carol", "dave"};
constexpr std::array<std::string_view, 4> kModels = {"Pixel-7", "Galaxy-S23", "Pixel-8",
                                                     "generic"};

std::string pick(std::mt19937_64& rng, const std::vector<std::string>& from) {
  return from[rng() % from.size()];
}

Amount pick_amount(std::mt19937_64& rng, Amount max_amount) {
  return 1 + rng() % max_amount;
}

std::vector<std::string> strategy_steps(Strategy strategy, bool attack) {
  switch (strategy) {
    case Strategy::kClaimClaim:
      if (!attack) return {"pay alice dave 2", "claim dave"};
      return {"replay last:ClaimReq", "inject-claim dave last:PaymentTransfer",
              "inject-claim bob last:PaymentTransfer", "claim dave"};
    case Strategy::kCollectCollect:
      if (!attack) return {"pay alice bob 2", "collect bob"};
      return {"inject-collect bob last:PaymentTransfer",
              "replay last:PaymentTransfer bob", "collect bob"};
    case Strategy::kClaimCollect:
      if (!attack) return {"pay alice dave 1", "claim dave", "pay alice bob 2", "collect bob"};
      return {"inject-claim bob last:PaymentTransfer", "replay last:ClaimReq",
              "inject-collect bob last:ClaimReq", "inject-collect carol last:ClaimReq"};
    case Strategy::kReplayDeposit:
      if (!attack) return {"deposit alice 3"};
      return {"replay last:DepositConfirmed alice", "replay last:DepositConfirmed bob",
              "replay last:DepositReq", "replay last:DepositConfirmed alice"};
    case Strategy::kReplayWithdraw:
      if (!attack) return {"withdraw alice 2"};
      return {"replay last:WithdrawReq", "resubmit alice last:WithdrawReq",
              "resubmit bob last:WithdrawReq"};
    case Strategy::kReplayPayment:
      if (!attack) return {"pay alice dave 1", "claim dave", "pay alice bob 2", "collect bob"};
      return {"replay last:PaymentTransfer", "inject-collect bob last:PaymentTransfer",
              "replay last:ClaimReq", "claim dave"};
    case Strategy::kForwardPayment:
      if (!attack) return {"pay alice bob 2"};
      return {"replay last:PaymentTransfer carol", "replay last:PaymentTransfer dave",
              "inject-collect carol last:PaymentTransfer",
              "inject-claim carol last:PaymentTransfer", "claim dave"};
    case Strategy::kRollbackTa:
      if (!attack) return {"snapshot_ta_store alice before-pay", "pay alice bob 2"};
      return {"rollback_ta_store alice before-pay", "pay alice carol 2",
              "withdraw alice 1", "deposit alice 1", "collect alice"};
  }
  return {};
}

void add_actor(ScenarioScript& s, std::size_t i) {
  s.actors.push_back({std::string(kNames[i]), i != 3, std::string(kModels[i])});
}

}  // namespace

std::string_view strategy_name(Strategy s) {
  return kStrategyNames[static_cast<std::size_t>(s)];
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (strategy_name(s) == name) return s;
  }
  return std::nullopt;
}

AttackPlan build_attack(Strategy strategy, std::uint64_t seed,
                        std::size_t random_steps) {
  AttackPlan plan;
  plan.strategy = strategy;
  plan.script.seed = seed;
  for (std::size_t i = 0; i < kNames.size(); ++i) add_actor(plan.script, i);

  std::vector<std::string> lines = {
      "register alice", "register bob",    "register carol",   "register dave",
      "setup_ta alice", "setup_ta bob",    "setup_ta carol",   "mint alice 20",
      "mint bob 20",    "mint carol 10",   "mint dave 5",      "deposit alice 10",
      "deposit bob 10", "deposit carol 5",
  };
  std::mt19937_64 rng(seed ^ 0x5eed5eed5eed5eedULL);
  const std::vector<std::string> everyone = {"alice", "bob", "carol", "dave"};
  const std::vector<std::string> tee = {"alice", "bob", "carol"};
  for (std::size_t i = 0; i < random_steps; ++i) {
    std::string a = pick(rng, everyone);
    Amount x = pick_amount(rng, 3);
    switch (rng() % 5) {
      case 0:
        lines.push_back("deposit " + a + " " + std::to_string(x));
        break;
      case 1:
        lines.push_back("withdraw " + a + " " + std::to_string(x));
        break;
      case 2: {
        std::string from = pick(rng, tee);
        std::string to = pick(rng, everyone);
        if (to == from) to = from == "alice" ? "dave" : "alice";
        lines.push_back("pay " + from + " " + to + " " + std::to_string(x));
        break;
      }
      case 3:
        lines.push_back("claim " + a);
        break;
      default:
        lines.push_back("collect " + a);
        break;
    }
  }
  // Fresh funds so the strategy's own setup always succeeds.
  lines.push_back("mint alice 6");
  lines.push_back("deposit alice 6");
  for (const std::string& l : strategy_steps(strategy, false)) lines.push_back(l);
  plan.attack_start = lines.size();
  for (const std::string& l : strategy_steps(strategy, true)) lines.push_back(l);

  for (const std::string& l : lines) plan.script.steps.push_back(parse_step(l));
  validate(plan.script);
  return plan;
}

bool AttackResult::defeated() const {
  if (!report.ok() || net_gain > 0) return false;
  for (const auto& [name, g] : gain) {
    if (g > 0) return false;
  }
  return true;
}

AttackResult run_attack(const AttackPlan& plan, const AttackHooks& hooks) {
  Simulator sim(plan.script);
  std::map<std::string, ActorHoldings> before;
  for (std::size_t i = 0; i < plan.script.steps.size(); ++i) {
    if (i == plan.attack_start) before = sim.report().holdings;
    sim.apply(plan.script.steps[i]);
    if (hooks.on_step) hooks.on_step(plan, i, sim);
  }
  if (plan.attack_start >= plan.script.steps.size()) before = sim.report().holdings;
  sim.finish();

  AttackResult result;
  result.strategy = plan.strategy;
  result.seed = plan.script.seed;
  result.report = sim.report();
  result.trace = sim.trace();
  for (const auto& [name, after] : result.report.holdings) {
    std::int64_t g = static_cast<std::int64_t>(after.total()) -
                     static_cast<std::int64_t>(before[name].total());
    result.gain[name] = g;
    result.net_gain += g;
  }
  if (hooks.on_result) hooks.on_result(plan, result);
  return result;
}

SuiteReport double_spend_suite(std::uint64_t first_seed, std::size_t seeds,
                               const AttackHooks& hooks) {
  SuiteReport suite;
  for (std::size_t i = 0; i < seeds; ++i) {
    for (Strategy s : kAllStrategies) {
      AttackResult r = run_attack(build_attack(s, first_seed + i), hooks);
      ++suite.runs;
      if (r.defeated()) {
        ++suite.defeated[s];
      } else {
        suite.failures.push_back(std::move(r));
      }
    }
  }
  return suite;
}

ScenarioScript generate_scenario(std::uint64_t seed, const GenOptions& options) {
  if (options.actors < 2 || options.actors > kNames.size() || options.max_amount == 0) {
    throw Error(ErrorCode::kScript, "generator needs 2-4 actors and a positive amount bound");
  }
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 1);
  ScenarioScript script;
  script.seed = seed;
  std::vector<std::string> everyone, tee;
  for (std::size_t i = 0; i < options.actors; ++i) {
    add_actor(script, i);
    everyone.emplace_back(kNames[i]);
    if (script.actors.back().tee) tee.emplace_back(kNames[i]);
  }
  Simulator sim(script);
  auto emit = [&](const std::string& line) {
    Step step = parse_step(line);
    sim.apply(step);
    script.steps.push_back(step);
  };

  for (const std::string& a : everyone) emit("register " + a);
  for (const std::string& a : tee) emit("setup_ta " + a);
  for (const std::string& a : everyone) emit("mint " + a + " " + std::to_string(5 + rng() % 11));
  for (const std::string& a : tee) {
    emit("deposit " + a + " " + std::to_string(pick_amount(rng, 5)));
  }

  const std::vector<MsgKind> droppable = {
      MsgKind::kDepositConfirmed, MsgKind::kWithdrawReq,  MsgKind::kWithdrawConfirmed,
      MsgKind::kClaimConfirmed,   MsgKind::kPaymentTransfer, MsgKind::kPayReq,
      MsgKind::kDepositReq,       MsgKind::kClaimReq};
  const std::vector<MsgKind> replayable = {
      MsgKind::kDepositConfirmed, MsgKind::kDepositReq, MsgKind::kWithdrawReq,
      MsgKind::kPaymentTransfer,  MsgKind::kClaimReq};
  const std::vector<std::string> sites = {
      "deposit-before-persist", "withdraw-after-persist", "withdraw-before-send",
      "pay-after-persist", "collect-before-persist"};
  std::map<std::string, int> snapshots;

  for (std::size_t i = 0; i < options.steps; ++i) {
    std::string a = pick(rng, everyone);
    std::string x = std::to_string(pick_amount(rng, options.max_amount));
    std::string line;
    if (!options.adversarial || rng() % 10 < 7) {
      switch (rng() % 7) {
        case 0:
          line = "deposit " + a + " " + x;
          break;
        case 1:
          line = "withdraw " + a + " " + x;
          break;
        case 2:
        case 3: {
          std::string from = tee.empty() ? a : pick(rng, tee);
          std::string to = pick(rng, everyone);
          if (to == from) to = everyone[(std::find(everyone.begin(), everyone.end(), from) -
                                         everyone.begin() + 1) % everyone.size()];
          line = "pay " + from + " " + to + " " + x;
          break;
        }
        case 4:
          line = "claim " + a;
          break;
        case 5:
          line = "collect " + a;
          break;
        default:
          line = "retry " + a;
          break;
      }
    } else {
      MsgKind kind = replayable[rng() % replayable.size()];
      const CapturedFrame* last = sim.network().last(kind);
      std::string ref = "last:" + std::string(msg_kind_name(kind));
      switch (rng() % 11) {
        case 0:
          line = "drop next:" +
                 std::string(msg_kind_name(droppable[rng() % droppable.size()]));
          break;
        case 1:
          line = "tamper next:" +
                 std::string(msg_kind_name(droppable[rng() % droppable.size()])) + " " +
                 std::to_string(rng() % 200) + " " + std::to_string(1 + rng() % 255);
          break;
        case 2:
          if (!tee.empty()) line = "crash " + pick(rng, tee) + " " + pick(rng, sites);
          break;
        case 3:
          if (last != nullptr) line = "replay " + ref + (rng() % 2 ? " " + a : "");
          break;
        case 4:
          if (last != nullptr && is_server_bound(kind)) line = "resubmit " + a + " " + ref;
          break;
        case 5: {
          const CapturedFrame* p = sim.network().last(MsgKind::kPaymentTransfer);
          if (p != nullptr) line = "inject-collect " + a + " last:PaymentTransfer";
          break;
        }
        case 6: {
          const CapturedFrame* p = sim.network().last(MsgKind::kPaymentTransfer);
          if (p != nullptr) line = "inject-claim " + a + " last:PaymentTransfer";
          break;
        }
        case 7:
          if (!tee.empty()) {
            std::string t = pick(rng, tee);
            const ta::TrustedApp* app = sim.actor(t).wallet.ta();
            if (app != nullptr) {
              std::string name = "s" + std::to_string(snapshots[t]++);
              line = "snapshot_ta_store " + t + " " + name;
            }
          }
          break;
        case 8:
          if (!tee.empty()) {
            std::string t = pick(rng, tee);
            int n = snapshots[t];
            if (n > 0 && rng() % 3 != 0) {
              line = "rollback_ta_store " + t + " s" + std::to_string(rng() % n);
            } else if (sim.actor(t).wallet.ta() != nullptr) {
              line = "rollback_ta_store " + t + " " + std::string(kGenuineSnapshot);
            }
          }
          break;
        case 9:
          line = "reorder " + std::to_string(2 + rng() % 2);
          break;
        default:
          line = (sim.actor(a).online ? "go_offline " : "go_online ") + a;
          break;
      }
    }
    if (line.empty()) line = "claim " + a;
    emit(line);
  }
  // Bring everyone back so trailing work can complete.
  for (const std::string& a : everyone) {
    if (!sim.actor(a).online) emit("go_online " + a);
  }
  return script;
}

}  // namespace ops::sim
