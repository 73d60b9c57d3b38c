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

import hashlib

import pytest
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

import ops_sim


def test_sha256_matches_hashlib():
    for data in (b"", b"abc", bytes(range(256))):
        assert ops_sim.sha256(data) == hashlib.sha256(data).digest()


def test_ed25519_matches_openssl():
    seed = bytes(range(32))
    key = Ed25519PrivateKey.from_private_bytes(seed)
    vk = key.public_key().public_bytes(
        serialization.Encoding.Raw, serialization.PublicFormat.Raw)
    assert ops_sim.ed25519_public_key(seed) == vk
    sig = ops_sim.ed25519_sign(b"pay 5", seed)
    assert sig == key.sign(b"pay 5")
    assert ops_sim.ed25519_verify(b"pay 5", sig, vk)
    assert not ops_sim.ed25519_verify(b"pay 6", sig, vk)


def test_demo_is_clean_and_balanced():
    r = ops_sim.demo()
    assert r["ok"]
    assert r["minted"] == r["online"] + r["offline"] + r["inflight"] + r["destroyed"]
    assert r["pay_steps"] == 1
    assert ops_sim.audit_trace(r["trace"]) == []
    lines = ops_sim.describe_trace(r["trace"])
    assert any("PaymentTransfer" in line for line in lines)


def test_runs_are_deterministic():
    script = ops_sim.generate_scenario(7, actors=3, steps=25, adversarial=True)
    a = ops_sim.run_scenario(script)
    b = ops_sim.run_scenario(script)
    assert a["trace"] == b["trace"]
    c = ops_sim.run_scenario(script, seed=8)
    assert c["trace"] != a["trace"]


def test_scenario_errors_raise():
    with pytest.raises(ops_sim.OpsError) as info:
        ops_sim.run_scenario("actor a tee\nregister nobody\n")
    assert info.value.code == 80
    assert "line 2" in str(info.value)


def test_format_round_trips():
    text = ops_sim.demo_script()
    assert ops_sim.format_scenario(text) == text


@pytest.mark.parametrize("strategy", ops_sim.strategies())
def test_attacks_are_defeated(strategy):
    r = ops_sim.attack(strategy, seed=3)
    assert r["defeated"], r["report"]["violations"]
    assert r["net_gain"] <= 0


def test_unknown_strategy():
    with pytest.raises(ValueError):
        ops_sim.attack("print-money")


def test_message_kind_and_framing():
    # PayConfirmed without an auth envelope: tag 11, flag 0.
    msg = bytes([11, 0])
    assert ops_sim.message_kind(msg) == "PayConfirmed"
    assert ops_sim.frame(msg) == b"\x00\x00\x00\x02" + msg
    with pytest.raises(ops_sim.OpsError):
        ops_sim.message_kind(bytes([11, 2]))
