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

// Python bindings: scenario runs, the attack catalogue, trace auditing and a
// few codec and crypto helpers. Results come back as plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "ops/codec.h"
#include "ops/crypto.h"
#include "ops/error.h"
#include "ops/sim/double_spend.h"
#include "ops/sim/scenario.h"
#include "ops/sim/simulator.h"
#include "ops/sim/trace.h"

namespace py = pybind11;

namespace {

ops::ByteView view(const py::bytes& b) {
  std::string_view s = b;
  return ops::as_bytes(s);
}

py::bytes to_py(ops::ByteView b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

py::dict report_dict(const ops::sim::AuditReport& r) {
  py::dict holdings;
  for (const auto& [name, h] : r.holdings) {
    py::dict d;
    d["online"] = h.online;
    d["offline"] = h.offline;
    d["inflight"] = h.inflight;
    holdings[py::str(name)] = d;
  }
  py::list violations;
  for (const auto& v : r.violations) {
    violations.append(py::make_tuple(v.step, v.property, v.detail));
  }
  py::dict out;
  out["ok"] = r.ok();
  out["minted"] = r.minted_total;
  out["online"] = r.sum_online;
  out["offline"] = r.sum_offline;
  out["inflight"] = r.sum_inflight;
  out["destroyed"] = r.sum_destroyed;
  out["holdings"] = holdings;
  out["violations"] = violations;
  out["warnings"] = r.warnings;
  out["pay_steps"] = r.pay_steps;
  out["sync_checks"] = r.sync_checks;
  out["rollbacks_injected"] = r.rollbacks_injected;
  out["rollbacks_detected"] = r.rollbacks_detected;
  return out;
}

py::dict run_dict(const ops::sim::RunResult& r) {
  py::dict out = report_dict(r.report);
  out["trace"] = ops::sim::encode_trace(r.trace);
  return out;
}

py::dict run_scenario(const std::string& text, std::optional<std::uint64_t> seed) {
  ops::sim::ScenarioScript script = ops::sim::parse_scenario(text);
  if (seed) script.seed = *seed;
  ops::sim::RunResult r;
  {
    py::gil_scoped_release release;
    r = ops::sim::run_scenario(script);
  }
  return run_dict(r);
}

py::dict attack(const std::string& name, std::uint64_t seed) {
  auto strategy = ops::sim::parse_strategy(name);
  if (!strategy) throw py::value_error("unknown strategy '" + name + "'");
  ops::sim::AttackResult r;
  {
    py::gil_scoped_release release;
    r = ops::sim::run_attack(ops::sim::build_attack(*strategy, seed));
  }
  py::dict out;
  out["strategy"] = name;
  out["seed"] = r.seed;
  out["defeated"] = r.defeated();
  out["net_gain"] = r.net_gain;
  out["gain"] = r.gain;
  out["report"] = report_dict(r.report);
  out["trace"] = ops::sim::encode_trace(r.trace);
  return out;
}

py::list audit_trace(const std::string& text) {
  py::list out;
  for (const auto& f : ops::sim::check_trace(ops::sim::decode_trace(text))) {
    out.append(py::make_tuple(f.step, f.property, f.detail));
  }
  return out;
}

std::vector<std::string> describe_trace(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& e : ops::sim::decode_trace(text)) out.push_back(ops::sim::describe(e));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Offline payment system simulator";
  ops::crypto::init_library();

  static py::exception<ops::Error> ops_error(m, "OpsError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ops::Error& e) {
      py::object type = py::reinterpret_borrow<py::object>(ops_error.ptr());
      py::object exc = type(e.what());
      exc.attr("code") = static_cast<int>(e.code());
      PyErr_SetObject(ops_error.ptr(), exc.ptr());
    }
  });

  m.def("run_scenario", &run_scenario, py::arg("text"), py::arg("seed") = py::none(),
        "Run a scenario script and return its audit report and encoded trace.");
  m.def("demo", [] { return run_dict(ops::sim::run_scenario(ops::sim::demo_scenario())); });
  m.def("demo_script",
        [] { return ops::sim::format_scenario(ops::sim::demo_scenario()); });
  m.def("format_scenario", [](const std::string& text) {
    return ops::sim::format_scenario(ops::sim::parse_scenario(text));
  }, "Parse a script and return its canonical rendering.");
  m.def("generate_scenario",
        [](std::uint64_t seed, std::size_t actors, std::size_t steps, bool adversarial) {
          ops::sim::GenOptions o;
          o.actors = actors;
          o.steps = steps;
          o.adversarial = adversarial;
          return ops::sim::format_scenario(ops::sim::generate_scenario(seed, o));
        },
        py::arg("seed"), py::arg("actors") = 3, py::arg("steps") = 20,
        py::arg("adversarial") = false);

  m.def("strategies", [] {
    std::vector<std::string> out;
    for (auto s : ops::sim::kAllStrategies) out.emplace_back(ops::sim::strategy_name(s));
    return out;
  });
  m.def("attack", &attack, py::arg("strategy"), py::arg("seed") = 1);

  m.def("audit_trace", &audit_trace, "Re-check an encoded trace; returns findings.");
  m.def("describe_trace", &describe_trace);

  m.def("sha256", [](const py::bytes& b) {
    ops::crypto::Digest d = ops::crypto::hash(view(b));
    return to_py(d);
  });
  m.def("ed25519_public_key", [](const py::bytes& seed) {
    return to_py(ops::crypto::SigningKey::from_seed(view(seed)).verification_key().view());
  });
  m.def("ed25519_sign", [](const py::bytes& msg, const py::bytes& seed) {
    return to_py(ops::crypto::sign(view(msg), view(seed)).view());
  });
  m.def("ed25519_verify", [](const py::bytes& msg, const py::bytes& sig,
                             const py::bytes& vk) {
    return ops::crypto::sig_verify(view(msg), view(sig), view(vk));
  });
  m.def("message_kind", [](const py::bytes& b) {
    return std::string(ops::msg_kind_name(ops::codec::decode_message(view(b)).kind()));
  }, "Decode a wire message and return its kind name; raises OpsError if malformed.");
  m.def("frame", [](const py::bytes& b) { return to_py(ops::codec::frame(view(b))); });
}
