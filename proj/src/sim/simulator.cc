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

#include "ops/sim/simulator.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <set>
#include <string_view>

#include "ops/codec.h"
#include "ops/error.h"
#include "ops/wire_format.h"

namespace ops::sim {
namespace {

constexpr std::string_view kAdversary = "adversary";

std::string endpoint(std::string_view name) { return std::string(name); }

// Detail text beyond the canonical message, if any.
std::string extra_detail(const Error& e) {
  std::string what = e.what();
  std::string_view base = error_message(e.code());
  if (what.size() > base.size() + 2 && what.compare(0, base.size(), base) == 0) {
    return what.substr(base.size() + 2);
  }
  return {};
}

ErrorCode response_code(ByteView response, std::string& detail) {
  try {
    WireMessage msg = codec::decode_message(response);
    if (const auto* rej = std::get_if<Rejected>(&msg.body)) {
      detail = rej->reason;
      return rej->code;
    }
    detail = std::string(msg_kind_name(msg.kind()));
    return ErrorCode::kOk;
  } catch (const Error& e) {
    return e.code();
  }
}

Payment payment_in(const CapturedFrame& frame) {
  WireMessage msg = codec::decode_message(frame.bytes);
  if (const auto* t = std::get_if<PaymentTransfer>(&msg.body)) return t->payment;
  if (const auto* c = std::get_if<ClaimReq>(&msg.body)) return c->payment;
  throw Error(ErrorCode::kScript,
              "frame #" + std::to_string(frame.id) + " carries no payment");
}

std::optional<ta::TAState> genuine_state(const Actor& a) {
  const ta::TrustedApp* app = a.wallet.ta();
  if (app == nullptr || app->store().empty()) return std::nullopt;
  return ta::decode_state(app->store().open(a.genuine_blob));
}

void write_payment_summary(Writer& w, const Payment& p) {
  codec::write_payment_key(w, codec::payment_key(p));
  w.u64(p.amount).fixed(p.receiver.vk.bytes);
}

}  // namespace

// ---------------------------------------------------------------------------
// Network

std::uint64_t Network::capture(const std::string& from, const std::string& to,
                               const Bytes& bytes) {
  CapturedFrame f;
  f.id = frames_.size() + 1;
  f.from = from;
  f.to = to;
  f.bytes = bytes;
  f.kind = static_cast<MsgKind>(bytes.empty() ? 0 : bytes[0]);
  frames_.push_back(std::move(f));
  return frames_.back().id;
}

std::optional<Bytes> Network::transmit(const std::string& from,
                                       const std::string& to, Bytes bytes,
                                       Trace& trace) {
  std::uint64_t id = capture(from, to, bytes);
  MsgKind kind = frames_.back().kind;
  auto rule = std::find_if(rules_.begin(), rules_.end(),
                           [&](const Rule& r) { return r.kind == kind; });
  if (rule == rules_.end()) {
    trace.push_back(FrameEvent{id, from, to, FrameFate::kDelivered, bytes});
    return bytes;
  }
  Rule r = *rule;
  rules_.erase(rule);
  if (r.drop) {
    trace.push_back(FrameEvent{id, from, to, FrameFate::kDropped, bytes});
    return std::nullopt;
  }
  bytes[r.offset % bytes.size()] ^= r.mask;
  trace.push_back(FrameEvent{id, from, to, FrameFate::kTampered, bytes});
  return bytes;
}

void Network::record_blocked(const std::string& from, const std::string& to,
                             const Bytes& bytes, Trace& trace) {
  trace.push_back(FrameEvent{0, from, to, FrameFate::kBlocked, bytes});
}

std::uint64_t Network::record_injected(const std::string& from,
                                       const std::string& to,
                                       const Bytes& bytes, Trace& trace) {
  std::uint64_t id = capture(from, to, bytes);
  trace.push_back(FrameEvent{id, from, to, FrameFate::kInjected, bytes});
  return id;
}

void Network::hold(const std::string& from, const Bytes& bytes, Trace& trace) {
  const std::string to(kServerEndpoint);
  std::uint64_t id = capture(from, to, bytes);
  trace.push_back(FrameEvent{id, from, to, FrameFate::kHeld, bytes});
  held.emplace_back(from, bytes);
}

const CapturedFrame* Network::last(MsgKind kind) const {
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
    if (it->kind == kind) return &*it;
  }
  return nullptr;
}

const CapturedFrame& Network::resolve(const FrameRef& ref) const {
  switch (ref.mode) {
    case FrameRef::Mode::kIndex:
      if (ref.index >= 1 && ref.index <= frames_.size()) return frames_[ref.index - 1];
      break;
    case FrameRef::Mode::kLast:
      if (const CapturedFrame* f = last(ref.kind)) return *f;
      break;
    case FrameRef::Mode::kNext:
      break;
  }
  throw Error(ErrorCode::kScript, "no captured frame " + format_ref(ref));
}

// ---------------------------------------------------------------------------
// Simulator

class Simulator::Link : public wallet::ServerLink {
 public:
  Link(Simulator& sim, Actor& actor) : sim_(sim), actor_(actor) {}
  std::optional<Bytes> call(ByteView request) override {
    return sim_.server_call(actor_, request);
  }

 private:
  Simulator& sim_;
  Actor& actor_;
};

Simulator::Simulator(const ScenarioScript& script)
    : rng_(script.seed),
      server_(server::Server::create(rng_)),
      oem_(wallet::OemAuthority::create(rng_)) {
  validate(script);
  server_.add_oem_root(oem_.root_vk());
  for (const ActorDecl& decl : script.actors) {
    wallet::DeviceIdentity device = oem_.provision_device(decl.model, rng_);
    device.ta_provisioned = decl.tee;
    wallet::Wallet w = wallet::Wallet::create(rng_, server_.vk());
    actors_.push_back(Actor{.decl = decl, .wallet = std::move(w), .device = std::move(device)});
  }
  AuditReport initial = audit();
  report_.minted_total = initial.minted_total;
  report_.holdings = initial.holdings;
}

const Actor& Simulator::actor(const std::string& name) const {
  for (const Actor& a : actors_) {
    if (a.decl.name == name) return a;
  }
  throw Error(ErrorCode::kScript, "unknown actor '" + name + "'");
}

Actor& Simulator::actor_mut(const std::string& name) {
  return const_cast<Actor&>(actor(name));
}

void Simulator::outcome(const std::string& actor, ErrorCode code,
                        const std::string& detail) {
  trace_.push_back(OutcomeEvent{actor, code, detail});
}

void Simulator::record_violation(const std::string& property,
                                 const std::string& detail) {
  report_.violations.push_back({step_, property, detail});
  trace_.push_back(ViolationEvent{step_, property, detail});
}

std::optional<Bytes> Simulator::server_call(Actor& a, ByteView request) {
  Bytes req(request.begin(), request.end());
  const std::string server = endpoint(kServerEndpoint);
  if (in_pay_) {
    record_violation("offline-verifiability",
                     a.decl.name + " contacted the server during a pay step");
  }
  if (!a.online || in_pay_) {
    network_.record_blocked(a.decl.name, server, req, trace_);
    throw Error(ErrorCode::kOffline);
  }
  if (network_.reorder_window > 0) {
    network_.hold(a.decl.name, req, trace_);
    if (network_.held.size() >= network_.reorder_window) flush_held();
    return std::nullopt;
  }
  std::optional<Bytes> delivered = network_.transmit(a.decl.name, server, req, trace_);
  if (!delivered) return std::nullopt;
  Bytes response = serve(*delivered);
  return network_.transmit(server, a.decl.name, std::move(response), trace_);
}

Bytes Simulator::serve(ByteView request) {
  Bytes response = server_.handle_frame(request);
  try {
    WireMessage req = codec::decode_message(request);
    if (!req.auth) return response;
    Actor* owner = nullptr;
    for (Actor& a : actors_) {
      if (a.wallet.vk() == req.auth->sender_vk) owner = &a;
    }
    if (owner == nullptr) return response;
    WireMessage resp = codec::decode_message(response);
    if (const auto* conf = std::get_if<DepositConfirmed>(&resp.body)) {
      owner->server_deposits[conf->id] = conf->amount;
    } else if (std::holds_alternative<WithdrawConfirmed>(resp.body)) {
      owner->server_withdraws.insert(std::get<WithdrawReq>(req.body).id);
    }
  } catch (const Error&) {
    // Garbage in, rejection out: nothing to account for.
  }
  return response;
}

void Simulator::observe_ta_counters() {
  for (Actor& a : actors_) {
    std::optional<ta::TAState> ts;
    try {
      ts = genuine_state(a);
    } catch (const Error&) {
      continue;
    }
    if (!ts || ts->id <= a.ta_id_seen) continue;
    // Within one step only the final bump can be a withdraw.
    for (std::uint64_t id = a.ta_id_seen + 1; id <= ts->id; ++id) {
      if (id == ts->id && ts->last_withdraw && ts->last_withdraw->id == id) {
        a.ta_withdraws[id] = ts->last_withdraw->amount;
      } else {
        a.ta_deposits.insert(id);
      }
    }
    a.ta_id_seen = ts->id;
  }
}

void Simulator::flush_held() {
  auto held = std::move(network_.held);
  network_.held.clear();
  network_.reorder_window = 0;
  std::shuffle(held.begin(), held.end(), rng_);
  const std::string server = endpoint(kServerEndpoint);
  for (auto& [from, bytes] : held) {
    std::optional<Bytes> delivered = network_.transmit(from, server, bytes, trace_);
    if (!delivered) continue;
    // The sender gave up waiting; the late response goes nowhere.
    Bytes response = serve(*delivered);
    network_.transmit(server, from, std::move(response), trace_);
  }
}

void Simulator::apply(const Step& step) {
  ++step_;
  trace_.push_back(StepEvent{step_, format_step(step)});
  const std::string who = step.actor.empty() ? endpoint(kAdversary) : step.actor;
  try {
    switch (step.action) {
      case Action::kRegister: {
        Actor& a = actor_mut(step.actor);
        Link link(*this, a);
        a.wallet.setup_client(link);
        outcome(who, ErrorCode::kOk);
        break;
      }
      case Action::kSetupTa: {
        Actor& a = actor_mut(step.actor);
        Link link(*this, a);
        a.wallet.setup_ta(link, a.device, rng_);
        outcome(who, ErrorCode::kOk);
        break;
      }
      case Action::kMint:
        server_.mint(actor(step.actor).wallet.vk(), step.amount);
        outcome(who, ErrorCode::kOk);
        break;
      case Action::kDeposit: {
        Actor& a = actor_mut(step.actor);
        Link link(*this, a);
        a.wallet.do_deposit(link, step.amount);
        outcome(who, ErrorCode::kOk);
        break;
      }
      case Action::kWithdraw: {
        Actor& a = actor_mut(step.actor);
        Link link(*this, a);
        a.wallet.do_withdraw(link, step.amount);
        outcome(who, ErrorCode::kOk);
        break;
      }
      case Action::kPay:
        do_pay(step);
        break;
      case Action::kClaim: {
        Actor& a = actor_mut(step.actor);
        Link link(*this, a);
        std::size_t n = a.wallet.do_claim(link);
        outcome(who, ErrorCode::kOk, std::to_string(n) + " claimed");
        break;
      }
      case Action::kCollect: {
        std::size_t n = actor_mut(step.actor).wallet.collect_pending();
        outcome(who, ErrorCode::kOk, std::to_string(n) + " collected");
        break;
      }
      case Action::kRetry: {
        Actor& a = actor_mut(step.actor);
        Link link(*this, a);
        a.wallet.resume(link);
        outcome(who, ErrorCode::kOk);
        break;
      }
      case Action::kGoOffline:
        actor_mut(step.actor).online = false;
        outcome(who, ErrorCode::kOk);
        break;
      case Action::kGoOnline:
        actor_mut(step.actor).online = true;
        outcome(who, ErrorCode::kOk);
        break;
      case Action::kSnapshotTaStore: {
        Actor& a = actor_mut(step.actor);
        if (a.wallet.ta() == nullptr) throw Error(ErrorCode::kNoTa);
        a.snapshots[step.label] = a.wallet.ta()->store().blob();
        outcome(who, ErrorCode::kOk);
        break;
      }
      case Action::kRollbackTaStore:
        do_rollback(step);
        break;
      case Action::kCrash: {
        Actor& a = actor_mut(step.actor);
        if (step.crash == CrashSite::kWithdrawBeforeSend) {
          a.wallet.arm_crash(wallet::WalletCrash::kWithdrawBeforeSend);
        } else {
          if (a.wallet.ta() == nullptr) throw Error(ErrorCode::kNoTa);
          ta::CrashPoint point = ta::CrashPoint::kNone;
          switch (step.crash) {
            case CrashSite::kDepositBeforePersist:
              point = ta::CrashPoint::kDepositBeforePersist;
              break;
            case CrashSite::kWithdrawAfterPersist:
              point = ta::CrashPoint::kWithdrawAfterPersist;
              break;
            case CrashSite::kPayAfterPersist:
              point = ta::CrashPoint::kPayAfterPersist;
              break;
            case CrashSite::kCollectBeforePersist:
              point = ta::CrashPoint::kCollectBeforePersist;
              break;
            case CrashSite::kWithdrawBeforeSend:
              break;
          }
          a.wallet.ta()->arm_crash(point);
        }
        outcome(who, ErrorCode::kOk);
        break;
      }
      case Action::kDrop:
        network_.add_rule({step.ref.kind, true, 0, 0});
        outcome(who, ErrorCode::kOk);
        break;
      case Action::kTamper:
        network_.add_rule({step.ref.kind, false, step.offset, step.mask});
        outcome(who, ErrorCode::kOk);
        break;
      case Action::kReplay:
        do_replay(step);
        break;
      case Action::kResubmit:
        do_resubmit(step);
        break;
      case Action::kInjectCollect:
        do_inject_collect(step);
        break;
      case Action::kInjectClaim:
        do_inject_claim(step);
        break;
      case Action::kReorder:
        if (!network_.held.empty()) flush_held();
        network_.reorder_window = step.window;
        outcome(who, ErrorCode::kOk);
        break;
    }
  } catch (const Error& e) {
    in_pay_ = false;
    if (e.code() == ErrorCode::kScript) throw;
    outcome(who, e.code(), extra_detail(e));
  }
  check_after_step();
}

void Simulator::do_pay(const Step& step) {
  Actor& payer = actor_mut(step.actor);
  Actor& payee = actor_mut(step.peer);
  ++report_.pay_steps;
  in_pay_ = true;

  PayReq request;
  try {
    request = payee.wallet.request_payment(step.amount);
  } catch (const Error& e) {
    in_pay_ = false;
    outcome(payee.decl.name, e.code(), extra_detail(e));
    return;
  }
  std::optional<Bytes> got = network_.transmit(
      payee.decl.name, payer.decl.name, codec::encode(WireMessage{request, {}}), trace_);
  if (!got) {
    in_pay_ = false;
    outcome(payer.decl.name, ErrorCode::kNoResponse, "payment request lost");
    return;
  }

  Payment payment;
  std::optional<ta::TAState> before = genuine_state(payer);
  try {
    WireMessage seen = codec::decode_message(*got, MsgKind::kPayReq);
    payment = payer.wallet.make_payment(std::get<PayReq>(seen.body), step_);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCrashed && before) {
      refresh_genuine();
      std::optional<ta::TAState> after = genuine_state(payer);
      if (after && after->bal < before->bal) lost_ += before->bal - after->bal;
    }
    in_pay_ = false;
    outcome(payer.decl.name, e.code(), extra_detail(e));
    return;
  }

  std::optional<Bytes> delivered =
      network_.transmit(payer.decl.name, payee.decl.name,
                        codec::encode(WireMessage{PaymentTransfer{payment}, {}}), trace_);
  outcome(payer.decl.name, ErrorCode::kOk, "paid " + std::to_string(payment.amount));
  if (!delivered) {
    in_pay_ = false;
    outcome(payee.decl.name, ErrorCode::kNoResponse, "payment lost in transit");
    return;
  }
  wallet::Acceptance acc;
  try {
    WireMessage msg = codec::decode_message(*delivered, MsgKind::kPaymentTransfer);
    acc = payee.wallet.accept_payment(std::get<PaymentTransfer>(msg.body).payment,
                                      request);
  } catch (const Error& e) {
    acc = {false, e.code()};
  }
  if (acc.accepted) {
    network_.transmit(payee.decl.name, payer.decl.name,
                      codec::encode(WireMessage{PayConfirmed{}, {}}), trace_);
  }
  in_pay_ = false;
  outcome(payee.decl.name, acc.reason, acc.accepted ? "accepted" : "refused");
}

void Simulator::do_replay(const Step& step) {
  const CapturedFrame frame = network_.resolve(step.ref);
  const std::string server = endpoint(kServerEndpoint);
  const std::string attacker = endpoint(kAdversary);

  if (is_server_bound(frame.kind)) {
    network_.record_injected(attacker, server, frame.bytes, trace_);
    Bytes response = serve(frame.bytes);
    network_.transmit(server, attacker, response, trace_);
    std::string detail;
    ErrorCode code = response_code(response, detail);
    outcome(attacker, code, detail);
    return;
  }

  const std::string target = step.peer.empty() ? frame.to : step.peer;
  if (target == server || target == attacker) {
    outcome(attacker, ErrorCode::kUnexpectedMessage, "no client endpoint");
    return;
  }
  Actor& a = actor_mut(target);
  network_.record_injected(attacker, target, frame.bytes, trace_);
  WireMessage msg = codec::decode_message(frame.bytes);

  if (const auto* conf = std::get_if<DepositConfirmed>(&msg.body)) {
    // The UA is untrusted: a replayed confirmation goes straight to the TA.
    if (a.wallet.ta() == nullptr) throw Error(ErrorCode::kNoTa);
    a.wallet.ta()->deposit(conf->amount, conf->id, conf->sig);
    outcome(target, ErrorCode::kOk, "deposit applied");
    return;
  }
  if (const auto* transfer = std::get_if<PaymentTransfer>(&msg.body)) {
    const Payment& p = transfer->payment;
    PayReq expected;
    expected.amount = p.amount;
    expected.receiver = a.wallet.registered() ? a.wallet.presented_cert() : p.receiver;
    wallet::Acceptance acc = a.wallet.accept_payment(p, expected);
    outcome(target, acc.reason, acc.accepted ? "accepted" : "refused");
    return;
  }
  outcome(target, ErrorCode::kUnexpectedMessage,
          std::string(msg_kind_name(frame.kind)) + " ignored");
}

void Simulator::do_resubmit(const Step& step) {
  const CapturedFrame frame = network_.resolve(step.ref);
  if (!is_server_bound(frame.kind)) {
    throw Error(ErrorCode::kScript, "resubmit needs a server-bound frame");
  }
  Actor& a = actor_mut(step.actor);
  WireMessage msg = codec::decode_message(frame.bytes);
  Bytes request = a.wallet.sign_request(msg.body);
  std::optional<Bytes> response = server_call(a, request);
  if (!response) {
    outcome(a.decl.name, ErrorCode::kNoResponse);
    return;
  }
  std::string detail;
  ErrorCode code = response_code(*response, detail);
  outcome(a.decl.name, code, detail);
}

void Simulator::do_inject_collect(const Step& step) {
  const CapturedFrame frame = network_.resolve(step.ref);
  Payment p = payment_in(frame);
  Actor& a = actor_mut(step.actor);
  network_.record_injected(endpoint(kAdversary), a.decl.name, frame.bytes, trace_);
  if (a.wallet.ta() == nullptr) throw Error(ErrorCode::kNoTa);
  a.wallet.ta()->collect(p);
  outcome(a.decl.name, ErrorCode::kOk, "collected");
}

void Simulator::do_inject_claim(const Step& step) {
  const CapturedFrame frame = network_.resolve(step.ref);
  Payment p = payment_in(frame);
  Actor& a = actor_mut(step.actor);
  Bytes request = a.wallet.sign_request(ClaimReq{p});
  std::optional<Bytes> response = server_call(a, request);
  if (!response) {
    outcome(a.decl.name, ErrorCode::kNoResponse);
    return;
  }
  std::string detail;
  ErrorCode code = response_code(*response, detail);
  outcome(a.decl.name, code, detail);
}

void Simulator::do_rollback(const Step& step) {
  Actor& a = actor_mut(step.actor);
  ta::TrustedApp* app = a.wallet.ta();
  if (app == nullptr) throw Error(ErrorCode::kNoTa);
  Bytes target;
  if (step.label == kGenuineSnapshot) {
    target = a.genuine_blob;
  } else {
    auto it = a.snapshots.find(step.label);
    if (it == a.snapshots.end()) {
      throw Error(ErrorCode::kScript, "no snapshot '" + step.label + "'");
    }
    target = it->second;
  }
  if (target == app->store().blob()) {
    outcome(a.decl.name, ErrorCode::kOk, "blob unchanged");
    return;
  }
  app->store().replace_blob(target);
  if (target == a.genuine_blob) {
    a.rollback_armed = false;
    outcome(a.decl.name, ErrorCode::kOk, "genuine blob restored");
    return;
  }
  ++report_.rollbacks_injected;
  a.rollback_armed = true;
  a.rollback_counted = false;
  a.armed_mic = app->store().mic();
  outcome(a.decl.name, ErrorCode::kOk, "blob replaced");
}

void Simulator::refresh_genuine() {
  for (Actor& a : actors_) {
    const ta::TrustedApp* app = a.wallet.ta();
    if (app == nullptr || app->store().empty()) continue;
    try {
      app->store().read();
      a.genuine_blob = app->store().blob();
    } catch (const Error&) {
      // Rolled back or tampered: keep the last genuine copy.
    }
  }
}

void Simulator::finish() {
  if (network_.held.empty()) return;
  ++step_;
  trace_.push_back(StepEvent{step_, "flush"});
  flush_held();
  check_after_step();
}

AuditReport Simulator::audit() const {
  AuditReport r;
  const server::ServerState& ss = server_.state();
  r.minted_total = ss.minted_total;

  std::map<crypto::VerificationKey, std::string> owner;
  for (const Actor& a : actors_) {
    owner[a.wallet.vk()] = a.decl.name;
    r.holdings[a.decl.name] = {};
  }
  for (const auto& [vk, account] : ss.accounts) {
    r.sum_online += account.onbal;
    if (auto it = owner.find(vk); it != owner.end()) {
      r.holdings[it->second].online += account.onbal;
    }
  }

  Amount stranded = 0;
  // Redeemed payment keys, with where they were redeemed.
  std::map<PaymentKey, std::vector<std::string>> redeemed;
  for (const PaymentKey& key : ss.plog) redeemed[key].push_back("server");

  for (const Actor& a : actors_) {
    std::optional<ta::TAState> ts;
    try {
      ts = genuine_state(a);
    } catch (const Error& e) {
      r.violations.push_back({step_, "audit", a.decl.name + ": " + e.what()});
      continue;
    }
    if (!ts) continue;
    r.sum_offline += ts->bal;
    ActorHoldings& h = r.holdings[a.decl.name];
    h.offline += ts->bal;
    for (const PaymentKey& key : ts->iplog) redeemed[key].push_back(a.decl.name);

    const server::Account* account = server_.account(a.wallet.vk());
    const std::uint64_t server_id = account != nullptr ? account->idctr : 0;
    // Deposits the server debited that the TA has not applied: still
    // applicable while ahead of the TA counter, stranded once it passed them.
    for (const auto& [id, amount] : a.server_deposits) {
      if (a.ta_deposits.contains(id)) continue;
      if (id > ts->id) {
        r.sum_inflight += amount;
        h.inflight += amount;
      } else {
        stranded += amount;
      }
    }
    // Withdraws the TA debited that the server has not credited.
    for (const auto& [id, amount] : a.ta_withdraws) {
      if (a.server_withdraws.contains(id)) continue;
      if (id > server_id) {
        r.sum_inflight += amount;
        h.inflight += amount;
      } else {
        stranded += amount;
      }
    }
  }

  for (const auto& [key, where] : redeemed) {
    if (where.size() > 1) {
      std::string detail = "payment " + key.sender_vk.hex().substr(0, 12) + "/" +
                           std::to_string(key.index) + " redeemed by";
      for (const std::string& w : where) detail += " " + w;
      r.violations.push_back({step_, "double-redemption", detail});
    }
  }

  std::set<PaymentKey> accepted;
  for (const Actor& a : actors_) {
    for (const PaymentKey& key : a.wallet.state().iplog) accepted.insert(key);
    for (const Payment& p : a.wallet.state().inbox) {
      PaymentKey key = codec::payment_key(p);
      if (redeemed.contains(key)) continue;
      r.sum_inflight += p.amount;
      r.holdings[a.decl.name].inflight += p.amount;
    }
  }

  r.sum_destroyed = lost_ + stranded;
  for (const Actor& a : actors_) {
    for (const Payment& p : a.wallet.state().sent) {
      PaymentKey key = codec::payment_key(p);
      if (!redeemed.contains(key) && !accepted.contains(key)) r.sum_destroyed += p.amount;
    }
  }

  Amount total = r.sum_online + r.sum_offline + r.sum_inflight + r.sum_destroyed;
  if (total != r.minted_total) {
    r.violations.push_back(
        {step_, "conservation",
         "minted " + std::to_string(r.minted_total) + " != online " +
             std::to_string(r.sum_online) + " + offline " +
             std::to_string(r.sum_offline) + " + inflight " +
             std::to_string(r.sum_inflight) + " + destroyed " +
             std::to_string(r.sum_destroyed)});
  }
  return r;
}

void Simulator::check_after_step() {
  refresh_genuine();
  observe_ta_counters();
  Amount destroyed_before = report_.sum_destroyed;
  AuditReport now = audit();
  report_.minted_total = now.minted_total;
  report_.sum_online = now.sum_online;
  report_.sum_offline = now.sum_offline;
  report_.sum_inflight = now.sum_inflight;
  report_.sum_destroyed = now.sum_destroyed;
  report_.holdings = now.holdings;
  for (const Violation& v : now.violations) {
    bool seen = std::any_of(report_.violations.begin(), report_.violations.end(),
                            [&](const Violation& o) {
                              return o.property == v.property && o.detail == v.detail;
                            });
    if (!seen) record_violation(v.property, v.detail);
  }

  // Counters must agree whenever no deposit or withdraw is outstanding.
  for (Actor& a : actors_) {
    const wallet::WalletState& ws = a.wallet.state();
    if (!a.wallet.activated() || ws.pending || ws.withdraw_needs_reissue) continue;
    const server::Account* account = server_.account(a.wallet.vk());
    std::optional<ta::TAState> ts;
    try {
      ts = genuine_state(a);
    } catch (const Error&) {
      continue;
    }
    if (account == nullptr || !ts) continue;
    // A round is complete once both sides account for every id.
    bool open = std::any_of(a.server_deposits.begin(), a.server_deposits.end(),
                            [&](const auto& d) { return !a.ta_deposits.contains(d.first); }) ||
                std::any_of(a.ta_withdraws.begin(), a.ta_withdraws.end(),
                            [&](const auto& w) { return !a.server_withdraws.contains(w.first); });
    if (open) continue;
    ++report_.sync_checks;
    bool in_sync = account->idctr == ts->id;
    if (!in_sync && !a.desync_reported) {
      record_violation("counter-sync", a.decl.name + ": server idctr " +
                                           std::to_string(account->idctr) +
                                           " != TA id " + std::to_string(ts->id));
    }
    a.desync_reported = !in_sync;
  }

  // Rolled-back stores must refuse every access and never be written.
  for (Actor& a : actors_) {
    if (!a.rollback_armed) continue;
    const ta::SecureStore& store = a.wallet.ta()->store();
    if (store.mic() != a.armed_mic) {
      record_violation("rollback", a.decl.name + ": TA wrote on a rolled-back store");
    }
    try {
      store.read();
      if (store.blob() == a.genuine_blob) {
        a.rollback_armed = false;
      } else {
        record_violation("rollback", a.decl.name + ": stale blob accepted");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kRollbackDetected ||
          e.code() == ErrorCode::kTamperDetected) {
        if (!a.rollback_counted) ++report_.rollbacks_detected;
        a.rollback_counted = true;
      }
    }
  }

  if (report_.sum_destroyed > destroyed_before) {
    std::string w = "value destroyed: " +
                    std::to_string(report_.sum_destroyed - destroyed_before) +
                    " released by a TA with no receiver to redeem it";
    report_.warnings.push_back(w);
    trace_.push_back(WarningEvent{step_, w});
  }
  trace_.push_back(AuditEvent{report_.minted_total, report_.sum_online,
                              report_.sum_offline, report_.sum_inflight,
                              report_.sum_destroyed});
}

crypto::Digest Simulator::fingerprint() const {
  Writer w;
  const server::ServerState& ss = server_.state();
  w.u64(ss.minted_total).u64(lost_);
  for (const auto& [vk, account] : ss.accounts) {
    w.fixed(vk.bytes).u8(account.ta_vk ? 1 : 0).u64(account.onbal).u64(account.idctr);
  }
  w.u32(static_cast<std::uint32_t>(ss.plog.size()));
  for (const PaymentKey& key : ss.plog) codec::write_payment_key(w, key);

  for (const Actor& a : actors_) {
    const wallet::WalletState& ws = a.wallet.state();
    w.u8(a.online ? 1 : 0).u8(a.wallet.registered() ? 1 : 0).u8(a.wallet.activated() ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(ws.iplog.size()));
    for (const PaymentKey& key : ws.iplog) codec::write_payment_key(w, key);
    w.u32(static_cast<std::uint32_t>(ws.inbox.size()));
    for (const Payment& p : ws.inbox) write_payment_summary(w, p);
    w.u32(static_cast<std::uint32_t>(ws.sent.size()));
    for (const Payment& p : ws.sent) write_payment_summary(w, p);
    w.u8(ws.pending ? static_cast<std::uint8_t>(ws.pending->op) : 0);
    if (ws.pending) w.bytes(codec::encode_body(codec::decode_message(ws.pending->frame).body));
    w.u8(ws.withdraw_needs_reissue ? 1 : 0);
    // Counter ledger, relative to the server counter so equal histories
    // reached by different paths compare equal.
    const server::Account* account = server_.account(a.wallet.vk());
    std::uint64_t base = account != nullptr ? account->idctr : 0;
    for (const auto& [id, amount] : a.server_deposits) {
      if (!a.ta_deposits.contains(id)) w.u64(base - id).u64(amount);
    }
    w.u8(0xee);
    for (const auto& [id, amount] : a.ta_withdraws) {
      if (!a.server_withdraws.contains(id)) w.u64(id - base).u64(amount);
    }

    const ta::TrustedApp* app = a.wallet.ta();
    if (app == nullptr || app->store().empty()) {
      w.u8(0);
      continue;
    }
    w.u8(1);
    try {
      std::optional<ta::TAState> ts = genuine_state(a);
      w.bytes(ta::encode_state(*ts));
    } catch (const Error&) {
      w.u8(0xff);
    }
    // Rollback material only matters once snapshots exist.
    if (a.rollback_armed || !a.snapshots.empty()) {
      w.u64(app->store().mic()).bytes(app->store().blob());
      for (const auto& [name, blob] : a.snapshots) w.str(name).bytes(blob);
    }
  }

  for (MsgKind kind : {MsgKind::kDepositConfirmed, MsgKind::kWithdrawReq,
                       MsgKind::kPaymentTransfer, MsgKind::kClaimReq}) {
    const CapturedFrame* f = network_.last(kind);
    w.u8(f ? 1 : 0);
    if (f == nullptr) continue;
    w.str(f->to);
    WireMessage msg = codec::decode_message(f->bytes);
    if (const auto* t = std::get_if<PaymentTransfer>(&msg.body)) {
      write_payment_summary(w, t->payment);
    } else if (const auto* c = std::get_if<ClaimReq>(&msg.body)) {
      write_payment_summary(w, c->payment);
    } else {
      w.bytes(codec::encode_body(msg.body));
      if (msg.auth) w.fixed(msg.auth->sender_vk.bytes);
    }
  }
  for (const Network::Rule& rule : network_.rules()) {
    w.u8(static_cast<std::uint8_t>(rule.kind)).u8(rule.drop ? 1 : 0).u64(rule.offset).u8(rule.mask);
  }
  w.u32(network_.reorder_window).u32(static_cast<std::uint32_t>(network_.held.size()));
  return crypto::hash(w.data());
}

RunResult run_scenario(const ScenarioScript& script, bool honor_env) {
  ScenarioScript effective = script;
  if (honor_env) {
    if (const char* env = std::getenv("OPS_SEED"); env != nullptr && *env != '\0') {
      std::string_view text(env);
      std::uint64_t seed = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::kScript, "OPS_SEED is not an unsigned integer");
      }
      effective.seed = seed;
    }
  }
  Simulator sim(effective);
  for (const Step& step : effective.steps) sim.apply(step);
  sim.finish();
  return {sim.report(), sim.trace()};
}

ScenarioScript demo_scenario() {
  return parse_scenario(R"(seed 7
actor alice tee model=Pixel-7
actor bob tee model=Galaxy-S23
register alice
register bob
setup_ta alice
setup_ta bob
mint alice 100
deposit alice 40
pay alice bob 25
collect bob
withdraw bob 25
withdraw alice 15
)");
}

}  // namespace ops::sim
