# Copyright 2026 The OPS Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python front end for the offline payment system simulator."""

from ._core import (
    OpsError,
    attack,
    audit_trace,
    demo,
    demo_script,
    describe_trace,
    ed25519_public_key,
    ed25519_sign,
    ed25519_verify,
    format_scenario,
    frame,
    generate_scenario,
    message_kind,
    run_scenario,
    sha256,
    strategies,
)

__all__ = [
    "OpsError",
    "attack",
    "audit_trace",
    "demo",
    "demo_script",
    "describe_trace",
    "ed25519_public_key",
    "ed25519_sign",
    "ed25519_verify",
    "format_scenario",
    "frame",
    "generate_scenario",
    "message_kind",
    "run_scenario",
    "sha256",
    "strategies",
]
