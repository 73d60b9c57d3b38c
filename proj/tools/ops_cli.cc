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

// ops: run scenarios, audit traces, and replay the double-spend catalogue.
//
//   ops run honest.scn --seed 3 --trace out.trace
//   ops audit out.trace
//   ops demo
//   ops attack replay-deposit
//   ops inspect server.snap
//
// Exit status: 0 clean, 1 property violations, 2 usage or script errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ops/crypto.h"
#include "ops/error.h"
#include "ops/server.h"
#include "ops/sim/double_spend.h"
#include "ops/sim/scenario.h"
#include "ops/sim/simulator.h"
#include "ops/sim/trace.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ops::Error(ops::ErrorCode::kScript, "cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ops::Error(ops::ErrorCode::kScript, "cannot write " + path);
  out << content;
}

void print_trace(const ops::sim::Trace& trace) {
  for (const auto& event : trace) std::cout << ops::sim::describe(event) << '\n';
}

int print_report(const ops::sim::AuditReport& r) {
  std::cout << "minted " << r.minted_total << " = online " << r.sum_online
            << " + offline " << r.sum_offline << " + inflight " << r.sum_inflight;
  if (r.sum_destroyed > 0) std::cout << " + destroyed " << r.sum_destroyed;
  std::cout << '\n';
  for (const auto& [name, h] : r.holdings) {
    std::cout << "  " << name << ": online " << h.online << ", offline " << h.offline
              << ", inflight " << h.inflight << '\n';
  }
  std::cout << "pay steps " << r.pay_steps << ", counter checks " << r.sync_checks
            << ", rollbacks detected " << r.rollbacks_detected << "/"
            << r.rollbacks_injected << '\n';
  for (const std::string& w : r.warnings) std::cout << "warning: " << w << '\n';
  for (const auto& v : r.violations) {
    std::cout << "VIOLATION [" << v.property << "] step " << v.step << ": " << v.detail
              << '\n';
  }
  std::cout << (r.ok() ? "no violations" : "violations found") << '\n';
  return r.ok() ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  ops::crypto::init_library();
  CLI::App app{"Offline payment system simulator"};
  app.require_subcommand(1);

  std::string script_path;
  std::string trace_out;
  std::string server_out;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Run a scenario script");
  run->add_option("script", script_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Override the script seed (beats OPS_SEED)");
  run->add_option("--trace", trace_out, "Write the event trace here");
  run->add_option("--save-server", server_out, "Persist the final server state here");
  run->add_flag("-v,--verbose", verbose, "Print every trace event");

  std::string trace_path;
  auto* audit = app.add_subcommand("audit", "Re-check the properties recorded in a trace");
  audit->add_option("trace", trace_path, "Trace file")->required();

  auto* demo = app.add_subcommand("demo", "Run the built-in honest scenario");
  demo->add_option("--trace", trace_out, "Write the event trace here");

  std::string strategy;
  std::uint64_t attack_seed = 1;
  std::size_t seeds = 1;
  auto* attack = app.add_subcommand("attack", "Run a double-spend strategy");
  attack->add_option("strategy", strategy, "Strategy name, or 'all'")->required();
  attack->add_option("--seed", attack_seed, "First seed");
  attack->add_option("--seeds", seeds, "Number of seeds");
  attack->add_option("--trace", trace_out, "Write the trace (single run only)");
  attack->add_flag("-v,--verbose", verbose, "Print every trace event");

  std::string snapshot_path;
  auto* inspect = app.add_subcommand("inspect", "Print a persisted server state");
  inspect->add_option("snapshot", snapshot_path, "Server snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) {
      ops::sim::ScenarioScript script = ops::sim::parse_scenario(read_file(script_path));
      ops::sim::RunResult result;
      if (seed) {
        script.seed = *seed;
        result = ops::sim::run_scenario(script);
      } else {
        result = ops::sim::run_scenario(script, /*honor_env=*/true);
      }
      if (verbose) print_trace(result.trace);
      if (!trace_out.empty()) write_file(trace_out, ops::sim::encode_trace(result.trace));
      if (!server_out.empty()) {
        // Re-run to reach the final server object; runs are deterministic.
        ops::sim::Simulator sim(script);
        if (!seed) {
          if (const char* env = std::getenv("OPS_SEED"); env != nullptr && *env != '\0') {
            script.seed = std::stoull(env);
            sim = ops::sim::Simulator(script);
          }
        }
        for (const auto& step : script.steps) sim.apply(step);
        sim.finish();
        sim.server().persist(server_out);
      }
      return print_report(result.report);
    }
    if (*audit) {
      ops::sim::Trace trace = ops::sim::decode_trace(read_file(trace_path));
      auto findings = ops::sim::check_trace(trace);
      std::size_t steps = 0;
      for (const auto& e : trace) steps += std::holds_alternative<ops::sim::StepEvent>(e);
      std::cout << trace.size() << " events over " << steps << " steps\n";
      for (const auto& f : findings) {
        std::cout << "VIOLATION [" << f.property << "] step " << f.step << ": " << f.detail
                  << '\n';
      }
      std::cout << (findings.empty() ? "no violations" : "violations found") << '\n';
      return findings.empty() ? kExitOk : kExitViolation;
    }
    if (*demo) {
      ops::sim::RunResult result = ops::sim::run_scenario(ops::sim::demo_scenario());
      print_trace(result.trace);
      if (!trace_out.empty()) write_file(trace_out, ops::sim::encode_trace(result.trace));
      return print_report(result.report);
    }
    if (*attack) {
      if (strategy == "all") {
        ops::sim::SuiteReport suite = ops::sim::double_spend_suite(attack_seed, seeds);
        for (ops::sim::Strategy s : ops::sim::kAllStrategies) {
          std::cout << ops::sim::strategy_name(s) << ": defeated " << suite.defeated[s]
                    << "/" << seeds << '\n';
        }
        for (const auto& f : suite.failures) {
          std::cout << "FAILED " << ops::sim::strategy_name(f.strategy) << " seed " << f.seed
                    << " net gain " << f.net_gain << '\n';
        }
        return suite.ok() ? kExitOk : kExitViolation;
      }
      auto s = ops::sim::parse_strategy(strategy);
      if (!s) {
        std::cerr << "unknown strategy '" << strategy << "'; one of:";
        for (auto k : ops::sim::kAllStrategies) std::cerr << ' ' << ops::sim::strategy_name(k);
        std::cerr << " all\n";
        return kExitUsage;
      }
      bool all_defeated = true;
      for (std::size_t i = 0; i < seeds; ++i) {
        ops::sim::AttackResult r =
            ops::sim::run_attack(ops::sim::build_attack(*s, attack_seed + i));
        if (verbose) print_trace(r.trace);
        if (!trace_out.empty() && seeds == 1) {
          write_file(trace_out, ops::sim::encode_trace(r.trace));
        }
        std::cout << ops::sim::strategy_name(*s) << " seed " << r.seed << ": net gain "
                  << r.net_gain << ", " << r.report.violations.size() << " violations -> "
                  << (r.defeated() ? "defeated" : "NOT DEFEATED") << '\n';
        all_defeated = all_defeated && r.defeated();
      }
      return all_defeated ? kExitOk : kExitViolation;
    }
    if (*inspect) {
      ops::server::Server server = ops::server::Server::restore(snapshot_path);
      const auto& st = server.state();
      std::cout << "server " << server.vk().hex() << '\n'
                << "minted " << st.minted_total << ", plog " << st.plog.size()
                << " entries, " << st.oem_roots.size() << " OEM roots\n";
      for (const auto& [vk, account] : st.accounts) {
        std::cout << "  " << vk.hex().substr(0, 16) << " onbal " << account.onbal
                  << " idctr " << account.idctr << " ta "
                  << (account.ta_vk ? account.ta_vk->hex().substr(0, 16) : "-") << '\n';
      }
      return kExitOk;
    }
  } catch (const ops::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
