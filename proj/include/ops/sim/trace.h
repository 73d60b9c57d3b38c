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

// Simulator event trace. One event per line, each the hex of its canonical
// encoding:
//
//   u8 tag | tag-specific fields
//
//   1 step       u32 index | str text
//   2 frame      u64 id | str from | str to | u8 fate | bytes payload
//   3 outcome    str actor | u8 error code | str detail
//   4 audit      u64 minted | u64 online | u64 offline | u64 inflight |
//                u64 destroyed
//   5 violation  u32 step | str property | str detail
//   6 warning    u32 step | str detail

#ifndef OPS_SIM_TRACE_H_
#define OPS_SIM_TRACE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ops/bytes.h"
#include "ops/error.h"
#include "ops/messages.h"

namespace ops::sim {

inline constexpr std::string_view kServerEndpoint = "server";

enum class FrameFate : std::uint8_t {
  kDelivered = 1,
  kDropped = 2,
  kTampered = 3,
  kHeld = 4,
  // The sender was offline; nothing left the device.
  kBlocked = 5,
  // Adversary re-injection of a captured frame.
  kInjected = 6,
};

std::string_view fate_name(FrameFate fate);

struct StepEvent {
  std::uint32_t index = 0;
  std::string text;
  bool operator==(const StepEvent&) const = default;
};

struct FrameEvent {
  std::uint64_t id = 0;
  std::string from;
  std::string to;
  FrameFate fate = FrameFate::kDelivered;
  Bytes payload;

  std::optional<MsgKind> kind() const;
  bool server_bound() const { return to == kServerEndpoint; }
  bool operator==(const FrameEvent&) const = default;
};

struct OutcomeEvent {
  std::string actor;
  ErrorCode code = ErrorCode::kOk;
  std::string detail;
  bool operator==(const OutcomeEvent&) const = default;
};

struct AuditEvent {
  Amount minted = 0;
  Amount online = 0;
  Amount offline = 0;
  Amount inflight = 0;
  Amount destroyed = 0;
  bool balanced() const { return minted == online + offline + inflight + destroyed; }
  bool operator==(const AuditEvent&) const = default;
};

struct ViolationEvent {
  std::uint32_t step = 0;
  std::string property;
  std::string detail;
  bool operator==(const ViolationEvent&) const = default;
};

struct WarningEvent {
  std::uint32_t step = 0;
  std::string detail;
  bool operator==(const WarningEvent&) const = default;
};

// Alternative index + 1 == tag.
using TraceEvent = std::variant<StepEvent, FrameEvent, OutcomeEvent, AuditEvent,
                                ViolationEvent, WarningEvent>;
using Trace = std::vector<TraceEvent>;

Bytes encode_event(const TraceEvent& event);
TraceEvent decode_event(ByteView bytes);

// Newline-delimited hex lines.
std::string encode_trace(const Trace& trace);
// Throws kMalformed on a bad line.
Trace decode_trace(std::string_view text);

// Human-readable rendering of one event.
std::string describe(const TraceEvent& event);

// Re-derives the trace-level properties independently of the simulator:
// recorded violations, the supply equation on every audit line, and the
// absence of server-bound frames inside pay steps.
struct TraceFinding {
  std::uint32_t step = 0;
  std::string property;
  std::string detail;
};
std::vector<TraceFinding> check_trace(const Trace& trace);

}  // namespace ops::sim

#endif  // OPS_SIM_TRACE_H_
