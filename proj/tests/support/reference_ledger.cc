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

#include "support/reference_ledger.h"

#include <sstream>
#include <stdexcept>

namespace ops::testing {

using sim::Action;
using sim::FrameRef;
using sim::Step;

ReferenceLedger::ReferenceLedger(const std::vector<sim::ActorDecl>& actors) {
  for (const sim::ActorDecl& d : actors) people_[d.name].tee = d.tee;
}

bool ReferenceLedger::supports(const Step& step) {
  switch (step.action) {
    case Action::kDrop:
    case Action::kTamper:
    case Action::kCrash:
    case Action::kReorder:
      return false;
    case Action::kReplay:
      return step.ref.mode == FrameRef::Mode::kLast;
    case Action::kResubmit:
      return step.ref.mode == FrameRef::Mode::kLast &&
             (step.ref.kind == MsgKind::kClaimReq ||
              step.ref.kind == MsgKind::kWithdrawReq);
    case Action::kInjectCollect:
    case Action::kInjectClaim:
      return step.ref.mode == FrameRef::Mode::kLast &&
             (step.ref.kind == MsgKind::kPaymentTransfer ||
              step.ref.kind == MsgKind::kClaimReq);
    default:
      return true;
  }
}

ReferenceLedger::Person& ReferenceLedger::at(const std::string& name) {
  auto it = people_.find(name);
  if (it == people_.end()) throw std::invalid_argument("unknown actor " + name);
  return it->second;
}

bool ReferenceLedger::has_ta(const std::string& actor) const {
  auto it = people_.find(actor);
  return it != people_.end() && it->second.has_ta;
}

std::vector<std::string> ReferenceLedger::snapshots(const std::string& actor) const {
  std::vector<std::string> out;
  auto it = people_.find(actor);
  if (it == people_.end()) return out;
  for (const auto& [name, version] : it->second.snapshots) out.push_back(name);
  return out;
}

void ReferenceLedger::ta_write(Person& p) {
  p.genuine += 1;
  p.live = p.genuine;
}

void ReferenceLedger::server_nonce_bump(Person& p) {
  if (p.pending.op != Op::kNone) p.pending.stale = true;
}

void ReferenceLedger::redeem_claim(int id) {
  Pay& pay = payments_[static_cast<std::size_t>(id)];
  if (pay.redeemed || pay.to_ta) return;
  pay.redeemed = true;
  at(pay.to).on += pay.amount;
}

bool ReferenceLedger::send_claim(Person& p, int id) {
  p.pending = {Op::kClaim, 0, id, false, false};
  return resume(p);
}

bool ReferenceLedger::resume(Person& p) {
  Pending& pend = p.pending;
  if (pend.op == Op::kNone) return true;
  if (!p.online) return false;
  switch (pend.op) {
    case Op::kNone:
      return true;
    case Op::kDeposit:
      if (pend.stale) {
        // Deposits are never re-signed; the server refuses the old nonce.
        if (pend.debited) exact_ = false;
        pend = {};
        return false;
      }
      if (!pend.debited) {
        if (p.on < pend.amount) {
          pend = {};
          return false;
        }
        p.on -= pend.amount;
        pend.debited = true;
      }
      if (p.frozen()) return false;
      p.off += pend.amount;
      ta_write(p);
      pend = {};
      return true;
    case Op::kWithdraw:
      p.on += pend.amount;
      pend = {};
      return true;
    case Op::kClaim: {
      int id = pend.payment;
      last_claim_ = id;
      redeem_claim(id);
      std::erase(p.inbox, id);
      pend = {};
      return true;
    }
  }
  return true;
}

std::optional<int> ReferenceLedger::payment_ref(const FrameRef& ref) const {
  if (ref.kind == MsgKind::kPaymentTransfer) return last_transfer_;
  if (ref.kind == MsgKind::kClaimReq) return last_claim_;
  return std::nullopt;
}

bool ReferenceLedger::apply(const Step& step) {
  if (!exact_) return false;
  if (!supports(step)) {
    exact_ = false;
    return false;
  }
  if (step.action == Action::kReplay) {
    // Server-bound frames hit the idempotency cache or the nonce check;
    // confirmations hit the TA counter; payments hit the receiver log.
    if (step.ref.kind == MsgKind::kPaymentTransfer && !last_transfer_) exact_ = false;
    return exact_;
  }
  Person& a = at(step.actor);
  const Amount x = step.amount;

  switch (step.action) {
    case Action::kRegister:
      if (!a.registered && a.online) a.registered = true;
      break;

    case Action::kSetupTa:
      a.has_ta = true;
      if (!a.tee || a.ta_initialized) break;
      a.ta_initialized = true;
      ta_write(a);
      if (a.registered && a.online) {
        a.activated = true;
        ta_write(a);
      }
      break;

    case Action::kMint:
      if (a.registered && x > 0) {
        a.on += x;
        minted_ += x;
      }
      break;

    case Action::kDeposit:
      if (!a.registered || !a.activated || x == 0) break;
      if (!resume(a) || a.frozen()) break;
      a.pending = {Op::kDeposit, x, -1, false, false};
      resume(a);
      break;

    case Action::kWithdraw:
      if (!a.registered || !a.activated || x == 0) break;
      if (!resume(a) || a.frozen() || a.off < x) break;
      a.off -= x;
      ta_write(a);
      a.pending = {Op::kWithdraw, x, -1, false, false};
      resume(a);
      break;

    case Action::kPay: {
      Person& b = at(step.peer);
      if (x == 0 || !b.registered) break;
      if (!a.activated || a.frozen() || a.off < x) break;
      a.off -= x;
      ta_write(a);
      payments_.push_back({step.peer, x, b.activated, false});
      int id = static_cast<int>(payments_.size()) - 1;
      b.inbox.push_back(id);
      last_transfer_ = id;
      break;
    }

    case Action::kClaim: {
      if (!resume(a)) break;
      std::vector<int> claimable;
      for (int id : a.inbox) {
        if (!payments_[static_cast<std::size_t>(id)].to_ta) claimable.push_back(id);
      }
      for (int id : claimable) {
        if (!send_claim(a, id)) break;
      }
      break;
    }

    case Action::kCollect: {
      if (!a.has_ta) break;
      std::vector<int> collectable;
      for (int id : a.inbox) {
        if (payments_[static_cast<std::size_t>(id)].to_ta) collectable.push_back(id);
      }
      for (int id : collectable) {
        if (a.frozen()) break;
        Pay& pay = payments_[static_cast<std::size_t>(id)];
        if (!pay.redeemed) {
          pay.redeemed = true;
          a.off += pay.amount;
          ta_write(a);
        }
        std::erase(a.inbox, id);
      }
      break;
    }

    case Action::kRetry:
      resume(a);
      break;

    case Action::kGoOffline:
      a.online = false;
      break;
    case Action::kGoOnline:
      a.online = true;
      break;

    case Action::kSnapshotTaStore:
      if (a.has_ta) a.snapshots[step.label] = a.live;
      break;

    case Action::kRollbackTaStore: {
      if (!a.has_ta) break;
      if (step.label == sim::kGenuineSnapshot) {
        a.live = a.genuine;
        break;
      }
      auto it = a.snapshots.find(step.label);
      if (it == a.snapshots.end()) {
        exact_ = false;
        return false;
      }
      a.live = it->second;
      break;
    }

    case Action::kResubmit:
      if (!a.online) break;
      if (a.registered) server_nonce_bump(a);
      if (step.ref.kind == MsgKind::kClaimReq) {
        if (!last_claim_) {
          exact_ = false;
          break;
        }
        if (a.registered) redeem_claim(*last_claim_);
      }
      break;

    case Action::kInjectCollect: {
      std::optional<int> id = payment_ref(step.ref);
      if (!id) {
        exact_ = false;
        break;
      }
      if (!a.activated || a.frozen()) break;
      Pay& pay = payments_[static_cast<std::size_t>(*id)];
      if (pay.to != step.actor || !pay.to_ta || pay.redeemed) break;
      pay.redeemed = true;
      a.off += pay.amount;
      ta_write(a);
      break;
    }

    case Action::kInjectClaim: {
      std::optional<int> id = payment_ref(step.ref);
      if (!id) {
        exact_ = false;
        break;
      }
      if (!a.online) break;
      last_claim_ = *id;
      if (!a.registered) break;
      server_nonce_bump(a);
      redeem_claim(*id);
      break;
    }

    default:
      exact_ = false;
      break;
  }
  return exact_;
}

std::map<std::string, ExpectedHoldings> ReferenceLedger::holdings() const {
  std::map<std::string, ExpectedHoldings> out;
  for (const auto& [name, p] : people_) {
    ExpectedHoldings& h = out[name];
    h.online = p.on;
    h.offline = p.off;
    for (int id : p.inbox) {
      const Pay& pay = payments_[static_cast<std::size_t>(id)];
      if (!pay.redeemed) h.inflight += pay.amount;
    }
    if (p.pending.op == Op::kWithdraw ||
        (p.pending.op == Op::kDeposit && p.pending.debited)) {
      h.inflight += p.pending.amount;
    }
  }
  return out;
}

std::string ReferenceLedger::compare(const sim::AuditReport& report) const {
  std::ostringstream diff;
  if (report.minted_total != minted_) {
    diff << "minted " << report.minted_total << " != " << minted_ << "; ";
  }
  for (const auto& [name, want] : holdings()) {
    auto it = report.holdings.find(name);
    sim::ActorHoldings got = it == report.holdings.end() ? sim::ActorHoldings{}
                                                         : it->second;
    if (got.online != want.online || got.offline != want.offline ||
        got.inflight != want.inflight) {
      diff << name << " has " << got.online << "/" << got.offline << "/"
           << got.inflight << " expected " << want.online << "/" << want.offline
           << "/" << want.inflight << "; ";
    }
  }
  return diff.str();
}

}  // namespace ops::testing
