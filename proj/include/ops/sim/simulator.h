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

// Deterministic protocol simulator with an adversarial network and a
// supply auditor.
//
// Every run is a pure function of its script: keys, devices and the order
// of held frames all come from one mt19937_64 seeded by the script, and the
// only clock is the step counter.

#ifndef OPS_SIM_SIMULATOR_H_
#define OPS_SIM_SIMULATOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ops/device.h"
#include "ops/server.h"
#include "ops/sim/scenario.h"
#include "ops/sim/trace.h"
#include "ops/wallet.h"

namespace ops::sim {

struct Violation {
  std::uint32_t step = 0;
  std::string property;
  std::string detail;
};

// Value attributable to one actor: what it could spend or redeem.
struct ActorHoldings {
  Amount online = 0;
  Amount offline = 0;
  // Accepted payments not yet redeemed, plus its own half-finished
  // deposits and withdraws.
  Amount inflight = 0;
  Amount total() const { return online + offline + inflight; }
  bool operator==(const ActorHoldings&) const = default;
};

struct AuditReport {
  Amount minted_total = 0;
  Amount sum_online = 0;
  Amount sum_offline = 0;
  Amount sum_inflight = 0;
  // Payments released by a TA that no receiver can ever redeem.
  Amount sum_destroyed = 0;
  std::map<std::string, ActorHoldings> holdings;
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  std::uint64_t rollbacks_injected = 0;
  std::uint64_t rollbacks_detected = 0;
  std::uint64_t sync_checks = 0;
  std::uint64_t pay_steps = 0;

  bool ok() const { return violations.empty(); }
};

struct CapturedFrame {
  std::uint64_t id = 0;
  std::string from;
  std::string to;
  Bytes bytes;
  MsgKind kind = MsgKind::kClientRegister;
};

// In-memory channels between named endpoints, with one-shot drop/tamper
// rules and an optional reorder buffer for server-bound traffic.
class Network {
 public:
  struct Rule {
    MsgKind kind;
    bool drop = false;
    std::uint64_t offset = 0;
    std::uint8_t mask = 0;
  };

  // Records the frame and applies the first matching rule. Returns what the
  // receiver sees, or nullopt if the frame was dropped.
  std::optional<Bytes> transmit(const std::string& from, const std::string& to,
                                Bytes bytes, Trace& trace);
  // Records a frame that never left its sender.
  void record_blocked(const std::string& from, const std::string& to,
                      const Bytes& bytes, Trace& trace);
  std::uint64_t record_injected(const std::string& from, const std::string& to,
                                const Bytes& bytes, Trace& trace);
  // Captures a server-bound frame into the reorder buffer.
  void hold(const std::string& from, const Bytes& bytes, Trace& trace);

  void add_rule(Rule rule) { rules_.push_back(rule); }
  // Throws Error(kScript) if the ref does not name a captured frame.
  const CapturedFrame& resolve(const FrameRef& ref) const;
  const CapturedFrame* last(MsgKind kind) const;
  const std::vector<CapturedFrame>& frames() const { return frames_; }
  const std::vector<Rule>& rules() const { return rules_; }

  std::uint32_t reorder_window = 0;
  std::vector<std::pair<std::string, Bytes>> held;

 private:
  std::uint64_t capture(const std::string& from, const std::string& to,
                        const Bytes& bytes);

  std::vector<CapturedFrame> frames_;
  std::vector<Rule> rules_;
};

struct Actor {
  ActorDecl decl;
  wallet::Wallet wallet;
  wallet::DeviceIdentity device;
  bool online = true;
  std::map<std::string, Bytes> snapshots{};
  // Last blob the TA wrote itself; the auditor reads through it while the
  // live blob is rolled back.
  Bytes genuine_blob{};
  bool rollback_armed = false;
  bool rollback_counted = false;
  std::uint64_t armed_mic = 0;
  bool desync_reported = false;

  // Counter ledger: which ids each side consumed, and for what. Lets the
  // auditor place value held between the two counters exactly, even after
  // they diverge.
  std::map<std::uint64_t, Amount> server_deposits{};
  std::set<std::uint64_t> server_withdraws{};
  std::set<std::uint64_t> ta_deposits{};
  std::map<std::uint64_t, Amount> ta_withdraws{};
  std::uint64_t ta_id_seen = 0;
};

class Simulator {
 public:
  // Sets up server, OEM and actors; no steps run yet.
  explicit Simulator(const ScenarioScript& script);

  // Runs one step, then audits. Honest failures become outcome events;
  // only unresolved frame refs throw (Error(kScript)).
  void apply(const Step& step);
  // Delivers anything still held in the reorder buffer.
  void finish();

  AuditReport audit() const;
  const AuditReport& report() const { return report_; }
  const Trace& trace() const { return trace_; }

  const server::Server& server() const { return server_; }
  const std::vector<Actor>& actors() const { return actors_; }
  const Actor& actor(const std::string& name) const;
  const Network& network() const { return network_; }
  std::uint32_t steps_run() const { return step_; }

  // Digest of the protocol-relevant state (balances, counters, logs,
  // pending work, captured attack material), ignoring nonces, frame ids and
  // the clock. Two states with equal fingerprints accept the same futures.
  crypto::Digest fingerprint() const;

 private:
  class Link;

  Actor& actor_mut(const std::string& name);
  void outcome(const std::string& actor, ErrorCode code,
               const std::string& detail = {});
  std::optional<Bytes> server_call(Actor& a, ByteView request);
  // Every request reaches the server through here.
  Bytes serve(ByteView request);
  void observe_ta_counters();
  void flush_held();
  void record_violation(const std::string& property, const std::string& detail);

  void do_pay(const Step& step);
  void do_replay(const Step& step);
  void do_resubmit(const Step& step);
  void do_inject_collect(const Step& step);
  void do_inject_claim(const Step& step);
  void do_rollback(const Step& step);
  void refresh_genuine();
  void check_after_step();

  std::mt19937_64 rng_;
  server::Server server_;
  wallet::OemAuthority oem_;
  std::vector<Actor> actors_;
  Network network_;
  Trace trace_;
  AuditReport report_;
  std::uint32_t step_ = 0;
  bool in_pay_ = false;
  // Amounts debited by a TA whose payment never left it.
  Amount lost_ = 0;
  std::vector<Payment> released_;
};

struct RunResult {
  AuditReport report;
  Trace trace;
};

// OPS_SEED in the environment overrides the script seed when honor_env.
RunResult run_scenario(const ScenarioScript& script, bool honor_env = false);

// Built-in honest demo scenario.
ScenarioScript demo_scenario();

}  // namespace ops::sim

#endif  // OPS_SIM_SIMULATOR_H_
