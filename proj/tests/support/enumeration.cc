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

#include "support/enumeration.h"

#include <map>
#include <sstream>

#include "ops/error.h"
#include "ops/sim/simulator.h"
#include "support/reference_ledger.h"

namespace ops::testing {
namespace {

using sim::Simulator;
using sim::Step;

struct Member {
  const char* name;
  bool tee;
};

constexpr Member kCast[] = {
    {"alice", true}, {"bob", true}, {"carol", false}, {"dave", true}};

std::string str(Amount x) { return std::to_string(x); }

struct Node {
  Simulator sim;
  ReferenceLedger ledger;
  std::vector<Step> path;
};

class Explorer {
 public:
  Explorer(const EnumerationConfig& config, EnumerationReport& report)
      : config_(config), report_(report) {
    for (std::size_t i = 0; i < config.actors; ++i) cast_.push_back(kCast[i]);
  }

  void run(Node& root) {
    if (check(root)) {
      root.path.clear();
      expand(root, config_.depth);
    }
  }

 private:
  std::vector<std::string> moves(const Simulator& sim) const;
  void expand(const Node& node, std::size_t remaining);
  bool check(Node& child);

  const EnumerationConfig& config_;
  EnumerationReport& report_;
  std::vector<Member> cast_;
  std::map<crypto::Digest, std::size_t> seen_;
};

std::vector<std::string> Explorer::moves(const Simulator& sim) const {
  std::vector<std::string> out;
  auto has = [&](MsgKind kind) { return sim.network().last(kind) != nullptr; };
  auto pays = [&]() {
    for (const Member& a : cast_) {
      if (!a.tee) continue;
      for (const Member& b : cast_) {
        if (&a == &b) continue;
        for (Amount x : config_.amounts) {
          out.push_back(std::string("pay ") + a.name + " " + b.name + " " + str(x));
        }
      }
    }
  };
  auto counters = [&]() {
    for (const Member& a : cast_) {
      if (!a.tee) continue;
      for (Amount x : config_.amounts) {
        out.push_back(std::string("deposit ") + a.name + " " + str(x));
        out.push_back(std::string("withdraw ") + a.name + " " + str(x));
      }
    }
  };

  switch (config_.family) {
    case Family::kPayments:
      pays();
      for (const Member& a : cast_) {
        if (a.tee) out.push_back(std::string("collect ") + a.name);
        out.push_back(std::string("claim ") + a.name);
      }
      if (has(MsgKind::kPaymentTransfer)) {
        out.emplace_back("replay last:PaymentTransfer");
        for (const Member& a : cast_) {
          out.push_back(std::string("replay last:PaymentTransfer ") + a.name);
          out.push_back(std::string("inject-claim ") + a.name + " last:PaymentTransfer");
          if (a.tee) {
            out.push_back(std::string("inject-collect ") + a.name +
                          " last:PaymentTransfer");
          }
        }
      }
      if (has(MsgKind::kClaimReq)) {
        out.emplace_back("replay last:ClaimReq");
        for (const Member& a : cast_) {
          out.push_back(std::string("resubmit ") + a.name + " last:ClaimReq");
        }
      }
      break;

    case Family::kCounters:
      counters();
      for (const Member& a : cast_) {
        if (!a.tee) continue;
        const bool online = sim.actor(a.name).online;
        out.push_back(std::string(online ? "go_offline " : "go_online ") + a.name);
        out.push_back(std::string("retry ") + a.name);
      }
      if (has(MsgKind::kDepositConfirmed)) {
        out.emplace_back("replay last:DepositConfirmed");
        for (const Member& a : cast_) {
          if (a.tee) out.push_back(std::string("replay last:DepositConfirmed ") + a.name);
        }
      }
      if (has(MsgKind::kDepositReq)) out.emplace_back("replay last:DepositReq");
      if (has(MsgKind::kWithdrawReq)) {
        out.emplace_back("replay last:WithdrawReq");
        for (const Member& a : cast_) {
          if (a.tee) out.push_back(std::string("resubmit ") + a.name + " last:WithdrawReq");
        }
      }
      break;

    case Family::kRollback:
      pays();
      counters();
      for (const Member& a : cast_) {
        if (!a.tee) continue;
        out.push_back(std::string("collect ") + a.name);
        out.push_back(std::string("snapshot_ta_store ") + a.name + " s");
        if (sim.actor(a.name).snapshots.contains("s")) {
          out.push_back(std::string("rollback_ta_store ") + a.name + " s");
        }
        out.push_back(std::string("rollback_ta_store ") + a.name + " @genuine");
      }
      break;
  }
  return out;
}

bool Explorer::check(Node& child) {
  const sim::AuditReport& r = child.sim.report();
  std::string why;
  if (!r.ok()) {
    why = r.violations.front().property + ": " + r.violations.front().detail;
  } else if (child.ledger.exact()) {
    ++report_.oracle_checks;
    why = child.ledger.compare(r);
  } else {
    why = "step outside the reference model";
  }
  if (why.empty()) return true;
  std::ostringstream out;
  out << family_name(config_.family) << "/" << config_.actors << ": " << why << "\n";
  for (const Step& s : child.path) out << "  " << sim::format_step(s) << "\n";
  report_.failures.push_back(out.str());
  return false;
}

void Explorer::expand(const Node& node, std::size_t remaining) {
  if (remaining == 0 || report_.failures.size() >= 10) return;
  for (const std::string& text : moves(node.sim)) {
    Node child = node;
    Step step = sim::parse_step(text);
    child.path.push_back(step);
    child.sim.apply(step);
    child.ledger.apply(step);
    ++report_.nodes;
    const sim::AuditReport& before = node.sim.report();
    const sim::AuditReport& after = child.sim.report();
    report_.sync_checks += after.sync_checks - before.sync_checks;
    report_.rollbacks_injected += after.rollbacks_injected - before.rollbacks_injected;
    report_.rollbacks_detected += after.rollbacks_detected - before.rollbacks_detected;
    report_.pay_steps += after.pay_steps - before.pay_steps;
    if (!check(child)) continue;

    crypto::Digest fp = child.sim.fingerprint();
    auto [it, fresh] = seen_.try_emplace(fp, remaining - 1);
    if (!fresh) {
      if (it->second >= remaining - 1) {
        ++report_.pruned;
        continue;
      }
      it->second = remaining - 1;
    }
    expand(child, remaining - 1);
  }
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::kPayments: return "payments";
    case Family::kCounters: return "counters";
    case Family::kRollback: return "rollback";
  }
  return "unknown";
}

void EnumerationReport::merge(const EnumerationReport& o) {
  nodes += o.nodes;
  pruned += o.pruned;
  oracle_checks += o.oracle_checks;
  sync_checks += o.sync_checks;
  rollbacks_injected += o.rollbacks_injected;
  rollbacks_detected += o.rollbacks_detected;
  pay_steps += o.pay_steps;
  failures.insert(failures.end(), o.failures.begin(), o.failures.end());
}

sim::ScenarioScript enumeration_prelude(std::size_t actors) {
  if (actors < 2 || actors > std::size(kCast)) {
    throw Error(ErrorCode::kScript, "enumeration needs 2-4 actors");
  }
  std::ostringstream text;
  text << "seed 11\n";
  for (std::size_t i = 0; i < actors; ++i) {
    text << "actor " << kCast[i].name << (kCast[i].tee ? " tee" : " plain") << "\n";
  }
  for (std::size_t i = 0; i < actors; ++i) text << "register " << kCast[i].name << "\n";
  for (std::size_t i = 0; i < actors; ++i) {
    const char* n = kCast[i].name;
    if (kCast[i].tee) {
      text << "setup_ta " << n << "\nmint " << n << " 6\ndeposit " << n << " 3\n";
    } else {
      text << "mint " << n << " 3\n";
    }
  }
  return sim::parse_scenario(text.str());
}

EnumerationReport enumerate(const EnumerationConfig& config) {
  EnumerationReport report;
  sim::ScenarioScript prelude = enumeration_prelude(config.actors);
  Node root{Simulator(prelude), ReferenceLedger(prelude.actors), {}};
  for (const Step& s : prelude.steps) {
    root.sim.apply(s);
    root.ledger.apply(s);
    root.path.push_back(s);
  }
  Explorer(config, report).run(root);
  return report;
}

std::vector<EnumerationConfig> standard_enumeration() {
  return {
      {Family::kPayments, 2, 6}, {Family::kPayments, 3, 4},
      {Family::kPayments, 4, 3}, {Family::kCounters, 2, 5},
      {Family::kCounters, 4, 3}, {Family::kRollback, 2, 4},
      {Family::kRollback, 3, 3},
  };
}

}  // namespace ops::testing
