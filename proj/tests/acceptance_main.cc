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

// Acceptance run: one PASS/FAIL line per criterion, exit 0 only if all pass.
//
//   ops_acceptance [--checklist] [--seeds N]
//
// --checklist prints the per-branch protocol checklist before the verdicts.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ops/crypto.h"
#include "ops/sim/double_spend.h"
#include "ops/sim/simulator.h"
#include "ops/sim/trace.h"
#include "support/conformance.h"
#include "support/enumeration.h"
#include "support/golden.h"
#include "support/reference_ledger.h"

namespace {

using namespace ops;
using namespace ops::testing;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  int number;
  std::string name;
  bool pass;
  std::string detail;
};

// Property tallies gathered from every run the acceptance suite performs.
struct Tally {
  std::uint64_t runs = 0;
  std::uint64_t audits = 0;
  std::uint64_t pay_steps = 0;
  std::uint64_t sync_checks = 0;
  std::uint64_t rollbacks_injected = 0;
  std::uint64_t rollbacks_detected = 0;
  std::map<std::string, std::uint64_t> findings;
  std::vector<std::string> examples;

  void add_report(const sim::AuditReport& r) {
    ++runs;
    pay_steps += r.pay_steps;
    sync_checks += r.sync_checks;
    rollbacks_injected += r.rollbacks_injected;
    rollbacks_detected += r.rollbacks_detected;
    for (const auto& v : r.violations) note(v.property, v.detail);
  }

  // Independent re-check of the recorded trace.
  void add_trace(const sim::Trace& trace, const std::string& label) {
    for (const auto& e : trace) audits += std::holds_alternative<sim::AuditEvent>(e);
    for (const auto& f : sim::check_trace(trace)) {
      note(f.property, label + " step " + std::to_string(f.step) + ": " + f.detail);
    }
  }

  void add_enumeration(const EnumerationReport& r) {
    pay_steps += r.pay_steps;
    sync_checks += r.sync_checks;
    rollbacks_injected += r.rollbacks_injected;
    rollbacks_detected += r.rollbacks_detected;
    for (const std::string& f : r.failures) {
      for (const char* p : {"conservation", "counter-sync", "rollback",
                            "offline-verifiability"}) {
        if (f.find(p) != std::string::npos) note(p, f);
      }
    }
  }

  void note(const std::string& property, const std::string& what) {
    ++findings[property];
    if (examples.size() < 5) examples.push_back("[" + property + "] " + what);
  }

  std::uint64_t count(const std::string& property) const {
    auto it = findings.find(property);
    return it == findings.end() ? 0 : it->second;
  }
};

Verdict criterion_conformance(bool print_checklist) {
  auto start = Clock::now();
  std::vector<BranchResult> results = run_conformance();
  double t = seconds_since(start);
  std::size_t covered = 0, passed = 0;
  std::string first_failure;
  for (const BranchResult& r : results) {
    covered += r.covered;
    passed += r.passed;
    if (!r.passed && first_failure.empty()) first_failure = r.branch.id + ": " + r.failure;
  }
  if (print_checklist) std::cout << format_checklist(results) << '\n';
  std::ostringstream d;
  d << covered << "/" << results.size() << " branches covered, " << passed
    << " passed, " << t << " s";
  if (!first_failure.empty()) d << "; first failure " << first_failure;
  bool ok = covered == results.size() && passed == results.size() && t < 10.0;
  return {1, "protocol conformance", ok, d.str()};
}

// Runs the attack catalogue with the reference ledger riding along, then the
// bounded exhaustive enumeration.
Verdict criterion_double_spend(std::size_t seeds, Tally& tally,
                               std::vector<std::string>& traces_for_determinism) {
  auto start = Clock::now();
  std::unique_ptr<ReferenceLedger> ledger;
  std::uint64_t oracle_checks = 0;
  std::vector<std::string> oracle_diffs;

  sim::AttackHooks hooks;
  hooks.on_step = [&](const sim::AttackPlan& plan, std::size_t i, const sim::Simulator& s) {
    if (i == 0) ledger = std::make_unique<ReferenceLedger>(plan.script.actors);
    if (!ledger) return;
    if (!ledger->apply(plan.script.steps[i])) {
      ledger.reset();
      return;
    }
    ++oracle_checks;
    std::string diff = ledger->compare(s.report());
    if (!diff.empty() && oracle_diffs.size() < 5) {
      oracle_diffs.push_back(std::string(sim::strategy_name(plan.strategy)) + ": " + diff);
    }
  };
  std::uint64_t attacked = 0;
  hooks.on_result = [&](const sim::AttackPlan& plan, const sim::AttackResult& r) {
    ++attacked;
    tally.add_report(r.report);
    tally.add_trace(r.trace, std::string(sim::strategy_name(plan.strategy)) + " seed " +
                                 std::to_string(r.seed));
    if (r.seed == 1) traces_for_determinism.push_back(sim::encode_trace(r.trace));
  };
  sim::SuiteReport suite = sim::double_spend_suite(1, seeds, hooks);
  double suite_t = seconds_since(start);

  EnumerationReport total;
  for (const EnumerationConfig& c : standard_enumeration()) {
    EnumerationReport r = enumerate(c);
    tally.add_enumeration(r);
    total.merge(r);
  }
  double t = seconds_since(start);

  std::ostringstream d;
  d << attacked << " attacks (" << sim::kAllStrategies.size() << " strategies x " << seeds
    << " seeds), " << suite.failures.size() << " not defeated, " << oracle_checks
    << " ledger cross-checks, " << oracle_diffs.size() << " disagreements; enumeration "
    << total.nodes << " states, " << total.oracle_checks << " ledger checks, "
    << total.failures.size() << " failures; " << suite_t << " s + " << (t - suite_t)
    << " s";
  for (const auto& f : suite.failures) {
    d << "; " << sim::strategy_name(f.strategy) << " seed " << f.seed << " gained "
      << f.net_gain;
    break;
  }
  if (!oracle_diffs.empty()) d << "; " << oracle_diffs.front();
  if (!total.failures.empty()) d << "; " << total.failures.front();
  bool ok = suite.ok() && oracle_diffs.empty() && total.ok() && oracle_checks > 0 &&
            t < 300.0;
  return {2, "double-spend resistance", ok, d.str()};
}

// Random honest and adversarial scripts feed the property tallies too.
void generated_runs(Tally& tally, std::vector<std::string>& traces) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    for (bool adversarial : {false, true}) {
      sim::GenOptions o;
      o.actors = 2 + seed % 3;
      o.steps = 30;
      o.adversarial = adversarial;
      sim::RunResult r = sim::run_scenario(sim::generate_scenario(seed, o));
      tally.add_report(r.report);
      tally.add_trace(r.trace, std::string(adversarial ? "adversarial" : "honest") +
                                   " seed " + std::to_string(seed));
      if (seed <= 5) traces.push_back(sim::encode_trace(r.trace));
    }
  }
  sim::RunResult demo = sim::run_scenario(sim::demo_scenario());
  tally.add_report(demo.report);
  tally.add_trace(demo.trace, "demo");
  traces.push_back(sim::encode_trace(demo.trace));
}

std::string first_example(const Tally& tally, const std::string& property) {
  for (const std::string& e : tally.examples) {
    if (e.rfind("[" + property + "]", 0) == 0) return "; " + e;
  }
  return {};
}

Verdict criterion_conservation(const Tally& t) {
  std::ostringstream d;
  d << t.audits << " per-step supply audits over " << t.runs << " runs, "
    << t.count("conservation") << " imbalances" << first_example(t, "conservation");
  return {3, "supply conservation", t.audits > 0 && t.count("conservation") == 0, d.str()};
}

Verdict criterion_counter_sync(const Tally& t) {
  std::ostringstream d;
  d << t.sync_checks << " completed-round checks, " << t.count("counter-sync")
    << " mismatches" << first_example(t, "counter-sync");
  return {4, "counter sync", t.sync_checks > 0 && t.count("counter-sync") == 0, d.str()};
}

Verdict criterion_rollback(const Tally& t) {
  std::ostringstream d;
  d << t.rollbacks_detected << "/" << t.rollbacks_injected << " injected rollbacks detected, "
    << t.count("rollback") << " balance changes on a rolled-back store"
    << first_example(t, "rollback");
  bool ok = t.rollbacks_injected > 0 && t.rollbacks_detected == t.rollbacks_injected &&
            t.count("rollback") == 0;
  return {5, "rollback detection", ok, d.str()};
}

Verdict criterion_offline(const Tally& t) {
  std::ostringstream d;
  d << t.pay_steps << " payments, " << t.count("offline-verifiability")
    << " server-bound frames inside a payment" << first_example(t, "offline-verifiability");
  return {6, "offline verifiability",
          t.pay_steps > 0 && t.count("offline-verifiability") == 0, d.str()};
}

Verdict criterion_golden() {
  GoldenReport r = check_codec_fixtures(default_fixture_dir());
  std::ostringstream d;
  d << r.golden_matched << "/" << r.golden_total << " golden vectors byte-exact, "
    << r.mutations_rejected << "/" << r.mutations_total << " mutations rejected";
  if (!r.failures.empty()) d << "; " << r.failures.front();
  bool ok = r.ok() && r.golden_total >= 20 && r.mutations_total >= 50;
  return {7, "codec golden vectors", ok, d.str()};
}

Verdict criterion_determinism(const std::vector<std::string>& first_traces) {
  std::vector<std::string> again;
  for (sim::Strategy s : sim::kAllStrategies) {
    again.push_back(sim::encode_trace(sim::run_attack(sim::build_attack(s, 1)).trace));
  }
  Tally scratch;
  generated_runs(scratch, again);
  std::size_t same = 0;
  for (std::size_t i = 0; i < first_traces.size() && i < again.size(); ++i) {
    same += first_traces[i] == again[i];
  }
  bool ok = !first_traces.empty() && first_traces.size() == again.size() &&
            same == first_traces.size();
  std::ostringstream d;
  d << same << "/" << first_traces.size() << " traces byte-identical on re-run";
  return {8, "determinism", ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  ops::crypto::init_library();
  bool print_checklist = false;
  std::size_t seeds = 1000;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--checklist") == 0) {
      print_checklist = true;
    } else if (std::strcmp(argv[i], "--seeds") == 0 && i + 1 < argc) {
      seeds = std::stoul(argv[++i]);
    } else {
      std::cerr << "usage: ops_acceptance [--checklist] [--seeds N]\n";
      return 2;
    }
  }

  std::vector<Verdict> verdicts;
  Tally tally;
  std::vector<std::string> traces;

  verdicts.push_back(criterion_conformance(print_checklist));
  verdicts.push_back(criterion_double_spend(seeds, tally, traces));
  generated_runs(tally, traces);
  verdicts.push_back(criterion_conservation(tally));
  verdicts.push_back(criterion_counter_sync(tally));
  verdicts.push_back(criterion_rollback(tally));
  verdicts.push_back(criterion_offline(tally));
  verdicts.push_back(criterion_golden());
  verdicts.push_back(criterion_determinism(traces));

  bool all = true;
  for (const Verdict& v : verdicts) {
    std::cout << "criterion " << v.number << " " << (v.pass ? "PASS" : "FAIL") << " "
              << v.name << ": " << v.detail << '\n';
    all = all && v.pass;
  }
  std::cout << (all ? "all criteria pass" : "some criteria FAIL") << '\n';
  return all ? 0 : 1;
}
