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

#include "ops/sim/trace.h"

#include <sstream>

#include "ops/wire_format.h"

namespace ops::sim {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view fate_name(FrameFate fate) {
  switch (fate) {
    case FrameFate::kDelivered: return "delivered";
    case FrameFate::kDropped: return "dropped";
    case FrameFate::kTampered: return "tampered";
    case FrameFate::kHeld: return "held";
    case FrameFate::kBlocked: return "blocked";
    case FrameFate::kInjected: return "injected";
  }
  return "?";
}

std::optional<MsgKind> FrameEvent::kind() const {
  if (payload.empty() || payload[0] < 1 || payload[0] > 14) return std::nullopt;
  return static_cast<MsgKind>(payload[0]);
}

Bytes encode_event(const TraceEvent& event) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(event.index() + 1));
  std::visit(Overloaded{
                 [&](const StepEvent& e) { w.u32(e.index).str(e.text); },
                 [&](const FrameEvent& e) {
                   w.u64(e.id).str(e.from).str(e.to);
                   w.u8(static_cast<std::uint8_t>(e.fate)).bytes(e.payload);
                 },
                 [&](const OutcomeEvent& e) {
                   w.str(e.actor).u8(static_cast<std::uint8_t>(e.code)).str(e.detail);
                 },
                 [&](const AuditEvent& e) {
                   w.u64(e.minted).u64(e.online).u64(e.offline);
                   w.u64(e.inflight).u64(e.destroyed);
                 },
                 [&](const ViolationEvent& e) {
                   w.u32(e.step).str(e.property).str(e.detail);
                 },
                 [&](const WarningEvent& e) { w.u32(e.step).str(e.detail); },
             },
             event);
  return std::move(w).take();
}

TraceEvent decode_event(ByteView bytes) {
  Reader r(bytes);
  TraceEvent out;
  switch (r.u8()) {
    case 1: {
      StepEvent e;
      e.index = r.u32();
      e.text = r.str();
      out = e;
      break;
    }
    case 2: {
      FrameEvent e;
      e.id = r.u64();
      e.from = r.str();
      e.to = r.str();
      std::uint8_t fate = r.u8();
      if (fate < 1 || fate > 6) throw Error(ErrorCode::kMalformed, "frame fate");
      e.fate = static_cast<FrameFate>(fate);
      e.payload = r.bytes();
      out = e;
      break;
    }
    case 3: {
      OutcomeEvent e;
      e.actor = r.str();
      std::uint8_t code = r.u8();
      if (code != 0 && !is_known_error_code(code)) {
        throw Error(ErrorCode::kMalformed, "error code");
      }
      e.code = static_cast<ErrorCode>(code);
      e.detail = r.str();
      out = e;
      break;
    }
    case 4: {
      AuditEvent e;
      e.minted = r.u64();
      e.online = r.u64();
      e.offline = r.u64();
      e.inflight = r.u64();
      e.destroyed = r.u64();
      out = e;
      break;
    }
    case 5: {
      ViolationEvent e;
      e.step = r.u32();
      e.property = r.str();
      e.detail = r.str();
      out = e;
      break;
    }
    case 6: {
      WarningEvent e;
      e.step = r.u32();
      e.detail = r.str();
      out = e;
      break;
    }
    default:
      throw Error(ErrorCode::kMalformed, "event tag");
  }
  r.expect_done();
  return out;
}

std::string encode_trace(const Trace& trace) {
  std::string out;
  for (const TraceEvent& e : trace) {
    out += to_hex(encode_event(e));
    out += '\n';
  }
  return out;
}

Trace decode_trace(std::string_view text) {
  Trace trace;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      trace.push_back(decode_event(from_hex(line)));
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformed,
                  "trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trace;
}

std::string describe(const TraceEvent& event) {
  std::ostringstream out;
  std::visit(
      Overloaded{
          [&](const StepEvent& e) { out << "step " << e.index << ": " << e.text; },
          [&](const FrameEvent& e) {
            auto kind = e.kind();
            out << "  frame #" << e.id << ' ' << e.from << " -> " << e.to << ' '
                << (kind ? msg_kind_name(*kind) : "?") << " (" << e.payload.size()
                << " bytes, " << fate_name(e.fate) << ')';
          },
          [&](const OutcomeEvent& e) {
            out << "  " << e.actor << ": "
                << (e.code == ErrorCode::kOk ? "ok" : error_message(e.code));
            if (!e.detail.empty()) out << " (" << e.detail << ')';
          },
          [&](const AuditEvent& e) {
            out << "  audit minted=" << e.minted << " online=" << e.online
                << " offline=" << e.offline << " inflight=" << e.inflight
                << " destroyed=" << e.destroyed;
          },
          [&](const ViolationEvent& e) {
            out << "  VIOLATION [" << e.property << "] step " << e.step << ": "
                << e.detail;
          },
          [&](const WarningEvent& e) {
            out << "  warning step " << e.step << ": " << e.detail;
          },
      },
      event);
  return out.str();
}

std::vector<TraceFinding> check_trace(const Trace& trace) {
  std::vector<TraceFinding> findings;
  std::uint32_t step = 0;
  bool in_pay = false;
  for (const TraceEvent& event : trace) {
    if (const auto* s = std::get_if<StepEvent>(&event)) {
      step = s->index;
      in_pay = s->text.rfind("pay ", 0) == 0;
    } else if (const auto* f = std::get_if<FrameEvent>(&event)) {
      if (in_pay && f->server_bound()) {
        findings.push_back({step, "offline-verifiability",
                            "server-bound frame #" + std::to_string(f->id) +
                                " during a pay step"});
      }
    } else if (const auto* a = std::get_if<AuditEvent>(&event)) {
      if (!a->balanced()) {
        findings.push_back({step, "conservation", describe(event).substr(2)});
      }
    } else if (const auto* v = std::get_if<ViolationEvent>(&event)) {
      findings.push_back({v->step, v->property, v->detail});
    }
  }
  return findings;
}

}  // namespace ops::sim
