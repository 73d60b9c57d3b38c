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

#include "ops/sim/scenario.h"

#include <array>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "ops/error.h"

namespace ops::sim {
namespace {

struct ActionInfo {
  Action action;
  std::string_view name;
};

constexpr std::array<ActionInfo, 21> kActions = {{
    {Action::kRegister, "register"},
    {Action::kSetupTa, "setup_ta"},
    {Action::kMint, "mint"},
    {Action::kDeposit, "deposit"},
    {Action::kWithdraw, "withdraw"},
    {Action::kPay, "pay"},
    {Action::kClaim, "claim"},
    {Action::kCollect, "collect"},
    {Action::kRetry, "retry"},
    {Action::kGoOffline, "go_offline"},
    {Action::kGoOnline, "go_online"},
    {Action::kSnapshotTaStore, "snapshot_ta_store"},
    {Action::kRollbackTaStore, "rollback_ta_store"},
    {Action::kCrash, "crash"},
    {Action::kDrop, "drop"},
    {Action::kTamper, "tamper"},
    {Action::kReplay, "replay"},
    {Action::kResubmit, "resubmit"},
    {Action::kInjectCollect, "inject-collect"},
    {Action::kInjectClaim, "inject-claim"},
    {Action::kReorder, "reorder"},
}};

constexpr std::array<std::pair<CrashSite, std::string_view>, 5> kCrashSites = {{
    {CrashSite::kDepositBeforePersist, "deposit-before-persist"},
    {CrashSite::kWithdrawAfterPersist, "withdraw-after-persist"},
    {CrashSite::kWithdrawBeforeSend, "withdraw-before-send"},
    {CrashSite::kPayAfterPersist, "pay-after-persist"},
    {CrashSite::kCollectBeforePersist, "collect-before-persist"},
}};

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::kScript, what);
}

std::vector<std::string_view> tokenize(std::string_view line) {
  // '#' also prefixes frame indices; only a '#' at a token start followed
  // by a non-digit begins a comment.
  for (std::size_t pos = 0; (pos = line.find('#', pos)) != std::string_view::npos; ++pos) {
    bool token_start = pos == 0 || line[pos - 1] == ' ' || line[pos - 1] == '\t';
    bool index_ref = pos + 1 < line.size() && line[pos + 1] >= '0' && line[pos + 1] <= '9';
    if (token_start && !index_ref) {
      line = line.substr(0, pos);
      break;
    }
  }
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::uint64_t parse_u64(std::string_view token, std::string_view what) {
  int base = 10;
  if (token.size() > 2 && token[0] == '0' && (token[1] == 'x' || token[1] == 'X')) {
    token.remove_prefix(2);
    base = 16;
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value, base);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    fail("bad " + std::string(what) + " '" + std::string(token) + "'");
  }
  return value;
}

FrameRef parse_ref(std::string_view token) {
  FrameRef ref;
  if (!token.empty() && token[0] == '#') {
    ref.mode = FrameRef::Mode::kIndex;
    ref.index = parse_u64(token.substr(1), "frame index");
    if (ref.index == 0) fail("frame indices start at #1");
    return ref;
  }
  auto colon = token.find(':');
  if (colon == std::string_view::npos) fail("bad frame ref '" + std::string(token) + "'");
  std::string_view mode = token.substr(0, colon);
  if (mode == "last") {
    ref.mode = FrameRef::Mode::kLast;
  } else if (mode == "next") {
    ref.mode = FrameRef::Mode::kNext;
  } else {
    fail("bad frame ref '" + std::string(token) + "'");
  }
  auto kind = parse_msg_kind(token.substr(colon + 1));
  if (!kind) fail("unknown message kind '" + std::string(token.substr(colon + 1)) + "'");
  ref.kind = *kind;
  return ref;
}

void expect_args(const std::vector<std::string_view>& tok, std::size_t lo,
                 std::size_t hi) {
  std::size_t n = tok.size() - 1;
  if (n < lo || n > hi) {
    fail(std::string(tok[0]) + ": expected " + std::to_string(lo) +
         (lo == hi ? "" : "-" + std::to_string(hi)) + " arguments, got " +
         std::to_string(n));
  }
}

std::string with_line(int line, const std::string& what) {
  return line > 0 ? "line " + std::to_string(line) + ": " + what : what;
}

}  // namespace

std::string_view action_name(Action action) {
  for (const auto& info : kActions) {
    if (info.action == action) return info.name;
  }
  return "?";
}

bool is_adversarial(Action action) {
  return static_cast<int>(action) >= static_cast<int>(Action::kSnapshotTaStore);
}

std::string_view crash_site_name(CrashSite site) {
  for (const auto& [s, name] : kCrashSites) {
    if (s == site) return name;
  }
  return "?";
}

std::string format_ref(const FrameRef& ref) {
  switch (ref.mode) {
    case FrameRef::Mode::kIndex:
      return "#" + std::to_string(ref.index);
    case FrameRef::Mode::kLast:
      return "last:" + std::string(msg_kind_name(ref.kind));
    case FrameRef::Mode::kNext:
      return "next:" + std::string(msg_kind_name(ref.kind));
  }
  return "?";
}

bool Step::operator==(const Step& o) const {
  return action == o.action && actor == o.actor && peer == o.peer &&
         amount == o.amount && label == o.label && ref == o.ref &&
         offset == o.offset && mask == o.mask && window == o.window &&
         crash == o.crash;
}

Step parse_step(std::string_view line) {
  std::vector<std::string_view> tok = tokenize(line);
  if (tok.empty()) fail("empty step");
  Step s;
  const ActionInfo* info = nullptr;
  for (const auto& a : kActions) {
    if (a.name == tok[0]) info = &a;
  }
  if (info == nullptr) fail("unknown action '" + std::string(tok[0]) + "'");
  s.action = info->action;

  switch (s.action) {
    case Action::kRegister:
    case Action::kSetupTa:
    case Action::kClaim:
    case Action::kCollect:
    case Action::kRetry:
    case Action::kGoOffline:
    case Action::kGoOnline:
      expect_args(tok, 1, 1);
      s.actor = tok[1];
      break;
    case Action::kMint:
    case Action::kDeposit:
    case Action::kWithdraw:
      expect_args(tok, 2, 2);
      s.actor = tok[1];
      s.amount = parse_u64(tok[2], "amount");
      break;
    case Action::kPay:
      expect_args(tok, 3, 3);
      s.actor = tok[1];
      s.peer = tok[2];
      s.amount = parse_u64(tok[3], "amount");
      break;
    case Action::kSnapshotTaStore:
    case Action::kRollbackTaStore:
      expect_args(tok, 2, 2);
      s.actor = tok[1];
      s.label = tok[2];
      break;
    case Action::kCrash: {
      expect_args(tok, 2, 2);
      s.actor = tok[1];
      bool found = false;
      for (const auto& [site, name] : kCrashSites) {
        if (name == tok[2]) {
          s.crash = site;
          found = true;
        }
      }
      if (!found) fail("unknown crash point '" + std::string(tok[2]) + "'");
      break;
    }
    case Action::kDrop:
      expect_args(tok, 1, 1);
      s.ref = parse_ref(tok[1]);
      if (s.ref.mode != FrameRef::Mode::kNext) fail("drop needs a next:<Kind> ref");
      break;
    case Action::kTamper: {
      expect_args(tok, 3, 3);
      s.ref = parse_ref(tok[1]);
      if (s.ref.mode != FrameRef::Mode::kNext) fail("tamper needs a next:<Kind> ref");
      s.offset = parse_u64(tok[2], "offset");
      std::uint64_t mask = parse_u64(tok[3], "mask");
      if (mask == 0 || mask > 0xff) fail("tamper mask must be 1..255");
      s.mask = static_cast<std::uint8_t>(mask);
      break;
    }
    case Action::kReplay:
      expect_args(tok, 1, 2);
      s.ref = parse_ref(tok[1]);
      if (s.ref.mode == FrameRef::Mode::kNext) fail("replay needs a captured frame");
      if (tok.size() == 3) s.peer = tok[2];
      break;
    case Action::kResubmit:
    case Action::kInjectCollect:
    case Action::kInjectClaim:
      expect_args(tok, 2, 2);
      s.actor = tok[1];
      s.ref = parse_ref(tok[2]);
      if (s.ref.mode == FrameRef::Mode::kNext) {
        fail(std::string(tok[0]) + " needs a captured frame");
      }
      break;
    case Action::kReorder: {
      expect_args(tok, 1, 1);
      std::uint64_t w = parse_u64(tok[1], "window");
      if (w < 2 || w > 64) fail("reorder window must be 2..64");
      s.window = static_cast<std::uint32_t>(w);
      break;
    }
  }
  return s;
}

std::string format_step(const Step& s) {
  std::ostringstream out;
  out << action_name(s.action);
  switch (s.action) {
    case Action::kRegister:
    case Action::kSetupTa:
    case Action::kClaim:
    case Action::kCollect:
    case Action::kRetry:
    case Action::kGoOffline:
    case Action::kGoOnline:
      out << ' ' << s.actor;
      break;
    case Action::kMint:
    case Action::kDeposit:
    case Action::kWithdraw:
      out << ' ' << s.actor << ' ' << s.amount;
      break;
    case Action::kPay:
      out << ' ' << s.actor << ' ' << s.peer << ' ' << s.amount;
      break;
    case Action::kSnapshotTaStore:
    case Action::kRollbackTaStore:
      out << ' ' << s.actor << ' ' << s.label;
      break;
    case Action::kCrash:
      out << ' ' << s.actor << ' ' << crash_site_name(s.crash);
      break;
    case Action::kDrop:
      out << ' ' << format_ref(s.ref);
      break;
    case Action::kTamper:
      out << ' ' << format_ref(s.ref) << ' ' << s.offset << ' '
          << static_cast<unsigned>(s.mask);
      break;
    case Action::kReplay:
      out << ' ' << format_ref(s.ref);
      if (!s.peer.empty()) out << ' ' << s.peer;
      break;
    case Action::kResubmit:
    case Action::kInjectCollect:
    case Action::kInjectClaim:
      out << ' ' << s.actor << ' ' << format_ref(s.ref);
      break;
    case Action::kReorder:
      out << ' ' << s.window;
      break;
  }
  return out.str();
}

void validate(const ScenarioScript& script) {
  std::set<std::string> actors;
  for (const ActorDecl& a : script.actors) {
    if (a.name.empty()) fail("empty actor name");
    if (a.name == "server") fail("'server' is reserved");
    if (!actors.insert(a.name).second) fail("actor '" + a.name + "' declared twice");
  }
  std::map<std::string, std::set<std::string>> snapshots;
  auto known = [&](const std::string& name, int line) {
    if (!actors.contains(name)) fail(with_line(line, "unknown actor '" + name + "'"));
  };
  for (const Step& s : script.steps) {
    if (s.action != Action::kDrop && s.action != Action::kTamper &&
        s.action != Action::kReorder && s.action != Action::kReplay) {
      known(s.actor, s.line);
    }
    if (!s.peer.empty()) known(s.peer, s.line);
    if (s.action == Action::kPay && s.actor == s.peer) {
      fail(with_line(s.line, "pay needs two distinct actors"));
    }
    if (s.action == Action::kSnapshotTaStore) {
      if (s.label == kGenuineSnapshot) fail(with_line(s.line, "snapshot name is reserved"));
      snapshots[s.actor].insert(s.label);
    }
    if (s.action == Action::kRollbackTaStore && s.label != kGenuineSnapshot &&
        !snapshots[s.actor].contains(s.label)) {
      fail(with_line(s.line, "no snapshot '" + s.label + "' for " + s.actor));
    }
  }
}

ScenarioScript parse_scenario(std::string_view text) {
  ScenarioScript script;
  bool have_seed = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    try {
      std::vector<std::string_view> tok = tokenize(line);
      if (tok.empty()) continue;
      if (tok[0] == "seed") {
        expect_args(tok, 1, 1);
        if (have_seed) fail("seed given twice");
        script.seed = parse_u64(tok[1], "seed");
        have_seed = true;
      } else if (tok[0] == "actor") {
        expect_args(tok, 2, 3);
        ActorDecl a;
        a.name = tok[1];
        if (tok[2] == "tee") {
          a.tee = true;
        } else if (tok[2] != "plain") {
          fail("actor kind must be tee or plain");
        }
        if (tok.size() == 4) {
          if (tok[3].substr(0, 6) != "model=" || tok[3].size() == 6) {
            fail("expected model=<name>");
          }
          a.model = tok[3].substr(6);
        }
        if (!script.steps.empty()) fail("actors must be declared before steps");
        script.actors.push_back(a);
      } else {
        Step s = parse_step(line);
        s.line = line_no;
        script.steps.push_back(s);
      }
    } catch (const Error& e) {
      std::string what = e.what();
      std::string prefix = std::string(error_message(ErrorCode::kScript)) + ": ";
      if (what.rfind(prefix, 0) == 0) what = what.substr(prefix.size());
      if (what.rfind("line ", 0) == 0) throw;
      fail(with_line(line_no, what));
    }
    if (end == text.size()) break;
  }
  validate(script);
  return script;
}

std::string format_scenario(const ScenarioScript& script) {
  std::ostringstream out;
  out << "seed " << script.seed << '\n';
  for (const ActorDecl& a : script.actors) {
    out << "actor " << a.name << ' ' << (a.tee ? "tee" : "plain");
    if (a.model != "generic") out << " model=" << a.model;
    out << '\n';
  }
  for (const Step& s : script.steps) out << format_step(s) << '\n';
  return out.str();
}

}  // namespace ops::sim
